#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gradlens/dataset.hpp"
#include "gradlens/metrics.hpp"
#include "gradlens/records.hpp"
#include "gradlens/tables.hpp"

namespace gradlens {

/// A demographic group: one intersectional cell, or every cell sharing a
/// gender label or a race label.
struct Group {
  enum class Kind { Cell, Gender, Race };

  Kind kind = Kind::Cell;
  std::string gender;  // empty for Kind::Race
  std::string race;    // empty for Kind::Gender

  static Group of_cell(Cell cell) { return {Kind::Cell, std::move(cell.gender), std::move(cell.race)}; }
  static Group of_gender(std::string label) { return {Kind::Gender, std::move(label), {}}; }
  static Group of_race(std::string label) { return {Kind::Race, {}, std::move(label)}; }

  /// "Race,Gender" for cells, the bare label otherwise.
  std::string label() const;

  friend bool operator==(const Group&, const Group&) = default;
};

/// Accepts "Race,Gender" (either order), or a single gender or race label,
/// resolved by exact match against the scheme (short IPEDS aliases allowed).
/// Throws UnknownGroup.
Group parse_group(const CategoryScheme& scheme, std::string_view text);

/// Degrees held by `group` in an intersectional (or matching single-axis) table.
std::uint64_t group_count(const CountTable& table, const Group& group);

enum class Metric { StandardShare, CohortShare, Evenness, JSDistance };

std::string_view to_string(Metric metric) noexcept;
std::optional<Metric> parse_metric(std::string_view text) noexcept;

struct SeriesPoint {
  int year = 0;
  double value = 0.0;  // percent, except JSDistance points which carry the raw distance
  std::string group;
  Metric metric = Metric::StandardShare;
  std::string institution;  // empty when the selection spans every institution

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

struct SeriesReport {
  std::vector<SeriesPoint> points;
  std::vector<std::string> warnings;
};

struct GapRow {
  Cell cell;
  double program_share = 0.0;     // percent of program degrees
  double university_share = 0.0;  // percent of all degrees
  double gap = 0.0;               // program - university, in points

  friend bool operator==(const GapRow&, const GapRow&) = default;
};

struct EvennessTriple {
  std::string institution;
  double gender = 0.0;  // percent
  double race = 0.0;
  double intersectional = 0.0;

  friend bool operator==(const EvennessTriple&, const EvennessTriple&) = default;
};

struct JsDistanceRow {
  std::string institution;
  double distance = 0.0;

  friend bool operator==(const JsDistanceRow&, const JsDistanceRow&) = default;
};

struct SkippedInstitution {
  std::string institution;
  std::string reason;

  friend bool operator==(const SkippedInstitution&, const SkippedInstitution&) = default;
};

struct ComparisonRow {
  std::string institution;
  std::string metric;
  std::optional<double> value;  // percent; empty when `error` is set
  std::optional<std::string> error;

  friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

struct DistributionPair {
  std::string institution;
  std::string program_label;
  std::string reference_label;
  Distribution program;
  Distribution reference;

  friend bool operator==(const DistributionPair&, const DistributionPair&) = default;
};

// ---------------------------------------------------------------------------
// Table-level operations

/// 100 * group's field degrees / all field degrees. ZeroPopulation on an empty table.
double standard_share(const CountTable& field_table, const Group& group);

/// 100 * group's field degrees / group's degrees across all fields. Depends on
/// nothing but those two counts. EmptyCohort when the group has no degrees at all.
double cohort_share(const CountTable& field_table, const CountTable& all_table, const Group& group);

/// One row per intersectional cell, most under-represented first.
/// ZeroPopulation if either table is empty.
std::vector<GapRow> opportunity_gap(const CountTable& program_table,
                                    const CountTable& university_table);

// ---------------------------------------------------------------------------
// Dataset-level operations

/// Who is selected: empty `institutions` means every institution (national).
struct Selection {
  std::vector<std::string> institutions;
  std::optional<AwardLevel> award_level = AwardLevel::Bachelors;
};

/// Intersectional table for one year and field scope.
CountTable select_table(const Dataset& dataset, const Selection& selection, int year,
                        const FieldScope& scope);

struct SeriesRequest {
  Metric metric = Metric::CohortShare;
  Group group;
  Selection selection;
  FieldScope scope = FieldScope::computing();
  FieldScope reference = FieldScope::all_degrees();
  YearRange years;
  bool per_institution = false;  // one line per institution instead of a pooled one
};

/// StandardShare, CohortShare or JSDistance per year. Years without data are
/// omitted and listed in warnings. Evenness goes through evenness_series.
/// Throws EmptyRange, UnknownGroup, UnknownInstitution.
SeriesReport series(const Dataset& dataset, const SeriesRequest& request);

struct EvennessRequest {
  Selection selection;
  Axis axis = Axis::Intersectional;
  FieldScope scope = FieldScope::computing();
  YearRange years;
};

/// Shannon equitability (percent) per year; k is the axis size of the scheme.
SeriesReport evenness_series(const Dataset& dataset, const EvennessRequest& request);

struct EvennessComparison {
  std::vector<EvennessTriple> rows;
  std::vector<SkippedInstitution> skipped;
};

/// Gender, race and intersectional equitability per institution for one year,
/// in request order.
EvennessComparison compare_evenness(const Dataset& dataset,
                                    const std::vector<std::string>& institutions, int year,
                                    const FieldScope& scope,
                                    std::optional<AwardLevel> award_level = AwardLevel::Bachelors);

struct GapReport {
  std::vector<GapRow> rows;
  std::vector<std::string> warnings;
};

GapReport gap_report(const Dataset& dataset, const Selection& selection, int year,
                     const FieldScope& program, const FieldScope& reference);

struct JsDistanceRequest {
  std::vector<std::string> institutions;  // empty: all
  int year = 0;
  FieldScope program = FieldScope::computing();
  FieldScope reference = FieldScope::all_degrees();
  std::optional<AwardLevel> award_level = AwardLevel::Bachelors;
};

struct JsDistanceReport {
  std::vector<JsDistanceRow> rows;  // descending distance
  std::vector<SkippedInstitution> skipped;
};

/// Intersectional JS distance between program and reference degrees per
/// institution. Institutions with an empty side are skipped, never fatal.
JsDistanceReport js_distance_report(const Dataset& dataset, const JsDistanceRequest& request);

struct MetricSpec {
  Metric metric = Metric::StandardShare;  // StandardShare or CohortShare
  Group group;
  FieldScope scope = FieldScope::computing();

  std::string label() const;
};

/// "standard:<group>" or "cohort:<group>".
MetricSpec parse_metric_spec(const CategoryScheme& scheme, std::string_view text);

struct ComparisonReport {
  std::vector<std::string> institutions;
  std::vector<ComparisonRow> rows;  // metric-major, institutions in request order
};

/// Rows shaped like a side-by-side institution table. Empty cohorts or
/// populations become per-cell error markers.
ComparisonReport compare_institutions(const Dataset& dataset,
                                      const std::vector<std::string>& institutions, int year,
                                      const std::vector<MetricSpec>& specs,
                                      std::optional<AwardLevel> award_level = AwardLevel::Bachelors);

/// Program and reference distributions over intersectional cells.
DistributionPair distribution_pair(const Dataset& dataset, const Selection& selection, int year,
                                   const FieldScope& program, const FieldScope& reference);

/// Rounds a percent to one decimal for display.
double round1(double percent) noexcept;

}  // namespace gradlens
