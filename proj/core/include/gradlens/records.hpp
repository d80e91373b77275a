#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gradlens/scheme.hpp"
#include "gradlens/tables.hpp"

namespace gradlens {

enum class AwardLevel { Certificate, Associates, Bachelors, Masters, Doctoral, Other };

std::string_view to_string(AwardLevel level) noexcept;
std::optional<AwardLevel> parse_award_level(std::string_view text) noexcept;
/// IPEDS AWLEVEL code (1..20) to award level.
AwardLevel award_level_from_ipeds(int code) noexcept;

/// CIP prefixes selecting a field. "11" is the computing family; finer
/// prefixes such as "11.07" narrow it to sub-CIP granularity.
class CipFilter {
 public:
  CipFilter() : CipFilter(std::vector<std::string>{"11"}) {}
  /// Prefixes must look like NN, NN.NN or NN.NNNN (InvalidFilter otherwise).
  explicit CipFilter(std::vector<std::string> prefixes);

  const std::vector<std::string>& prefixes() const noexcept { return prefixes_; }
  bool matches(std::string_view cip) const noexcept;

  /// Canonical "NN.NNNN" text for a CIP code, restoring a leading zero that
  /// spreadsheet round-trips tend to drop ("1.0101" -> "01.0101").
  static std::string normalize_code(std::string_view code);

  friend bool operator==(const CipFilter&, const CipFilter&) = default;

 private:
  std::vector<std::string> prefixes_;
};

class FieldScope {
 public:
  enum class Kind { Computing, AllDegrees, Field };

  static FieldScope computing(CipFilter cips = {}) { return {Kind::Computing, std::move(cips)}; }
  static FieldScope all_degrees() { return {Kind::AllDegrees, CipFilter{}}; }
  static FieldScope field(CipFilter cips) { return {Kind::Field, std::move(cips)}; }

  /// "cip11" | "computing" | "all" | "cip:<prefix>[,<prefix>...]"
  static FieldScope parse(std::string_view text);

  Kind kind() const noexcept { return kind_; }
  const CipFilter& cips() const noexcept { return cips_; }
  bool matches(std::string_view cip) const noexcept {
    return kind_ == Kind::AllDegrees || cips_.matches(cip);
  }
  /// Inverse of parse().
  std::string describe() const;

  friend bool operator==(const FieldScope&, const FieldScope&) = default;

 private:
  FieldScope(Kind kind, CipFilter cips) : kind_(kind), cips_(std::move(cips)) {}

  Kind kind_;
  CipFilter cips_;
};

/// One aggregate observation: graduates of one cell, at one institution,
/// in one year, CIP code and award level.
struct DegreeRecord {
  std::string institution_id;
  int year = 0;
  std::string cip;
  AwardLevel award_level = AwardLevel::Bachelors;
  Cell cell;
  std::uint64_t count = 0;

  bool is_computing() const noexcept { return cip.starts_with("11"); }

  friend bool operator==(const DegreeRecord&, const DegreeRecord&) = default;
};

struct YearRange {
  int first = 0;
  int last = 0;

  bool contains(int year) const noexcept { return year >= first && year <= last; }
  bool empty() const noexcept { return first > last; }
  /// "2010-2019" or a single "2020". Throws EmptyRange / InvalidFilter.
  static YearRange parse(std::string_view text);

  friend bool operator==(const YearRange&, const YearRange&) = default;
};

struct RecordFilter {
  std::vector<std::string> institutions;  // empty: every institution
  std::optional<YearRange> years;
  FieldScope scope = FieldScope::all_degrees();
  std::optional<AwardLevel> award_level = AwardLevel::Bachelors;  // nullopt: any level

  bool matches(const DegreeRecord& record) const noexcept;
};

/// Sums matching records into an intersectional table over `scheme`.
/// Records whose labels fall outside the scheme throw SchemeMismatch.
CountTable aggregate(std::span<const DegreeRecord> records, const CategoryScheme& scheme,
                     const RecordFilter& filter = {});

}  // namespace gradlens
