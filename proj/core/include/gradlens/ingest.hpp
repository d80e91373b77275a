#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gradlens/dataset.hpp"

namespace gradlens {

/// Where each canonical field lives in a raw completions file. Text format,
/// one `key = value` per line, `#` comments:
///
///   institution  = UNITID
///   cip          = CIPCODE
///   award_level  = AWLEVEL
///   major_number = MAJORNUM        (optional)
///   year         = YEAR            (optional; otherwise pass a year at ingest)
///   cell Hispanic or Latino,Women = CHISPW
class ColumnMap {
 public:
  std::string institution_column;
  std::string cip_column;
  std::string award_level_column;
  std::optional<std::string> major_number_column;
  std::optional<std::string> year_column;
  std::vector<std::pair<Cell, std::string>> cells;

  /// Throws InvalidColumnMap with the offending line.
  static ColumnMap parse(std::string_view text);
  static ColumnMap load(const std::filesystem::path& path);
  /// Layout of recent IPEDS Completions "C<year>_A" files.
  static ColumnMap ipeds_completions();

  std::string serialize() const;

  /// Every scheme cell must be mapped exactly once (InvalidColumnMap).
  void validate_against(const CategoryScheme& scheme) const;
};

struct IngestOptions {
  IngestPolicy policy;
  std::optional<int> year;        // for raw files without a year column
  std::optional<std::string> name;  // dataset name on first ingest
};

struct IngestReport {
  DatasetManifest manifest;
  bool already_ingested = false;
  std::size_t rows_read = 0;
  std::size_t rows_skipped = 0;
  std::size_t records_added = 0;
  std::uint64_t total_added = 0;
  std::vector<std::string> unmapped_columns;  // raw columns nothing refers to
  std::vector<std::string> excluded_columns;  // mapped to categories the scheme leaves out
  std::vector<std::string> warnings;
};

/// Reads a raw IPEDS-style completions file into the dataset directory
/// (created if missing). All-or-nothing: any MissingColumn, NegativeCount or
/// MalformedRow leaves the store untouched. Grand-total rows (CIP 99) and
/// two-digit summary rows are skipped, as are second majors unless the
/// dataset policy includes them. Re-ingesting a file with the same digest is
/// a no-op.
IngestReport ingest_raw(const std::filesystem::path& dataset_dir,
                        const std::filesystem::path& source, const ColumnMap& columns,
                        const IngestOptions& options = {});

/// Reads a canonical long-format CSV. Duplicate keys are summed with a
/// warning; labels outside the scheme throw SchemeMismatch.
IngestReport ingest_canonical(const std::filesystem::path& dataset_dir,
                              const std::filesystem::path& source,
                              const IngestOptions& options = {});

/// Copies an `institution_id,name` lookup file into the dataset.
void import_institution_names(const std::filesystem::path& dataset_dir,
                              const std::filesystem::path& source);

}  // namespace gradlens
