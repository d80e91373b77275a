#include "gradlens/error.hpp"

namespace gradlens {

std::string_view error_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ZeroPopulation: return "zero_population";
    case ErrorKind::EmptyCohort: return "empty_cohort";
    case ErrorKind::SchemeMismatch: return "scheme_mismatch";
    case ErrorKind::CategoryMismatch: return "category_mismatch";
    case ErrorKind::DegenerateK: return "degenerate_k";
    case ErrorKind::InvalidDistribution: return "invalid_distribution";
    case ErrorKind::UnknownGroup: return "unknown_group";
    case ErrorKind::UnknownInstitution: return "unknown_institution";
    case ErrorKind::EmptyRange: return "empty_range";
    case ErrorKind::MissingColumn: return "missing_column";
    case ErrorKind::NegativeCount: return "negative_count";
    case ErrorKind::MalformedRow: return "malformed_row";
    case ErrorKind::InvalidColumnMap: return "invalid_column_map";
    case ErrorKind::InvalidFilter: return "invalid_filter";
    case ErrorKind::EmptyPayload: return "empty_payload";
    case ErrorKind::ManifestCorrupt: return "manifest_corrupt";
    case ErrorKind::Io: return "io_error";
  }
  return "error";
}

}  // namespace gradlens
