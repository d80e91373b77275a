#include "gradlens/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "gradlens/error.hpp"

namespace gradlens {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

void require_known(const Dataset& dataset, const std::vector<std::string>& institutions) {
  for (const auto& id : institutions)
    if (!dataset.has_institution(id))
      throw Error(ErrorKind::UnknownInstitution, "institution not in dataset", id);
}

void require_years(const Dataset& dataset, const YearRange& years) {
  if (years.empty())
    throw Error(ErrorKind::EmptyRange, "year range is empty",
                std::to_string(years.first) + "-" + std::to_string(years.last));
  const auto& span = dataset.manifest().years;
  if (!span || years.last < span->first || years.first > span->last)
    throw Error(ErrorKind::EmptyRange, "year range lies outside the dataset",
                std::to_string(years.first) + "-" + std::to_string(years.last));
}

void require_group(const CategoryScheme& scheme, const Group& group) {
  bool ok = true;
  switch (group.kind) {
    case Group::Kind::Cell: ok = scheme.cell_index(Cell{group.gender, group.race}).has_value(); break;
    case Group::Kind::Gender: ok = scheme.gender_index(group.gender).has_value(); break;
    case Group::Kind::Race: ok = scheme.race_index(group.race).has_value(); break;
  }
  if (!ok) throw Error(ErrorKind::UnknownGroup, "group not in scheme", group.label());
}

std::string year_warning(int year, const Error& e) {
  return std::to_string(year) + ": " + std::string(e.name()) + " (" + e.what() + ")";
}

// Selections to evaluate: one pooled selection, or one per institution.
std::vector<std::pair<std::string, Selection>> expand(const Dataset& dataset,
                                                      const Selection& selection,
                                                      bool per_institution) {
  std::vector<std::pair<std::string, Selection>> out;
  if (!per_institution) {
    std::string label;
    for (std::size_t i = 0; i < selection.institutions.size(); ++i)
      label += (i ? "+" : "") + selection.institutions[i];
    out.emplace_back(label, selection);
    return out;
  }
  auto ids = selection.institutions.empty() ? dataset.institutions() : selection.institutions;
  for (const auto& id : ids) out.emplace_back(id, Selection{{id}, selection.award_level});
  return out;
}

}  // namespace

std::string Group::label() const {
  switch (kind) {
    case Kind::Cell: return race + "," + gender;
    case Kind::Gender: return gender;
    case Kind::Race: return race;
  }
  return {};
}

Group parse_group(const CategoryScheme& scheme, std::string_view text) {
  text = trim(text);
  auto comma = text.find(',');
  if (comma == std::string_view::npos) {
    if (auto g = scheme.resolve_gender(text)) return Group::of_gender(*g);
    if (auto r = scheme.resolve_race(text)) return Group::of_race(*r);
    throw Error(ErrorKind::UnknownGroup, "no gender or race label matches", std::string(text));
  }
  auto first = trim(text.substr(0, comma));
  auto second = trim(text.substr(comma + 1));
  auto race = scheme.resolve_race(first);
  auto gender = scheme.resolve_gender(second);
  if (!race || !gender) {
    race = scheme.resolve_race(second);
    gender = scheme.resolve_gender(first);
  }
  if (!race || !gender)
    throw Error(ErrorKind::UnknownGroup, "expected 'Race,Gender'", std::string(text));
  return Group::of_cell(Cell{*gender, *race});
}

std::uint64_t group_count(const CountTable& table, const Group& group) {
  switch (group.kind) {
    case Group::Kind::Cell: return table.count(Cell{group.gender, group.race});
    case Group::Kind::Gender: return marginalize(table, Axis::Gender).count(group.gender);
    case Group::Kind::Race: return marginalize(table, Axis::Race).count(group.race);
  }
  return 0;
}

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
    case Metric::StandardShare: return "standard";
    case Metric::CohortShare: return "cohort";
    case Metric::Evenness: return "evenness";
    case Metric::JSDistance: return "jsdistance";
  }
  return "?";
}

std::optional<Metric> parse_metric(std::string_view text) noexcept {
  for (auto m : {Metric::StandardShare, Metric::CohortShare, Metric::Evenness, Metric::JSDistance})
    if (text == to_string(m)) return m;
  return std::nullopt;
}

double standard_share(const CountTable& field_table, const Group& group) {
  if (field_table.total() == 0)
    throw Error(ErrorKind::ZeroPopulation, "no degrees in the selected field", group.label());
  return 100.0 * static_cast<double>(group_count(field_table, group)) /
         static_cast<double>(field_table.total());
}

double cohort_share(const CountTable& field_table, const CountTable& all_table, const Group& group) {
  const auto cohort = group_count(all_table, group);
  if (cohort == 0)
    throw Error(ErrorKind::EmptyCohort, "group has no degrees in any field", group.label());
  return 100.0 * static_cast<double>(group_count(field_table, group)) / static_cast<double>(cohort);
}

std::vector<GapRow> opportunity_gap(const CountTable& program_table,
                                    const CountTable& university_table) {
  if (program_table.axis() != Axis::Intersectional ||
      university_table.axis() != Axis::Intersectional ||
      program_table.scheme() != university_table.scheme())
    throw Error(ErrorKind::CategoryMismatch, "gap needs two intersectional tables of one scheme");
  if (program_table.total() == 0)
    throw Error(ErrorKind::ZeroPopulation, "program table is empty", "program");
  if (university_table.total() == 0)
    throw Error(ErrorKind::ZeroPopulation, "university table is empty", "reference");
  auto program = normalize(program_table);
  auto university = normalize(university_table);
  std::vector<GapRow> rows;
  rows.reserve(program.size());
  for (std::size_t i = 0; i < program.size(); ++i) {
    double p = 100.0 * program[i];
    double u = 100.0 * university[i];
    rows.push_back(GapRow{program_table.scheme().cell_at(i), p, u, p - u});
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const GapRow& a, const GapRow& b) { return a.gap < b.gap; });
  return rows;
}

CountTable select_table(const Dataset& dataset, const Selection& selection, int year,
                        const FieldScope& scope) {
  RecordFilter filter{selection.institutions, YearRange{year, year}, scope, selection.award_level};
  return dataset.table(filter);
}

SeriesReport series(const Dataset& dataset, const SeriesRequest& request) {
  if (request.metric == Metric::Evenness)
    throw Error(ErrorKind::InvalidFilter, "evenness series need an axis; use evenness_series");
  require_group(dataset.scheme(), request.group);
  require_known(dataset, request.selection.institutions);
  require_years(dataset, request.years);

  SeriesReport report;
  for (const auto& [label, selection] :
       expand(dataset, request.selection, request.per_institution)) {
    for (int year = request.years.first; year <= request.years.last; ++year) {
      auto field = select_table(dataset, selection, year, request.scope);
      try {
        double value = 0.0;
        switch (request.metric) {
          case Metric::StandardShare: value = standard_share(field, request.group); break;
          case Metric::CohortShare:
            value = cohort_share(field, select_table(dataset, selection, year, request.reference),
                                 request.group);
            break;
          case Metric::JSDistance:
            value = js_distance(
                normalize(field),
                normalize(select_table(dataset, selection, year, request.reference)));
            break;
          case Metric::Evenness: break;
        }
        report.points.push_back(SeriesPoint{
            year, value,
            request.metric == Metric::JSDistance ? std::string("intersectional")
                                                 : request.group.label(),
            request.metric, label});
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ZeroPopulation && e.kind() != ErrorKind::EmptyCohort) throw;
        report.warnings.push_back((label.empty() ? "" : label + " ") + year_warning(year, e));
      }
    }
  }
  return report;
}

SeriesReport evenness_series(const Dataset& dataset, const EvennessRequest& request) {
  require_known(dataset, request.selection.institutions);
  require_years(dataset, request.years);
  const std::size_t k = dataset.scheme().size(request.axis);
  std::string label;
  for (std::size_t i = 0; i < request.selection.institutions.size(); ++i)
    label += (i ? "+" : "") + request.selection.institutions[i];

  SeriesReport report;
  for (int year = request.years.first; year <= request.years.last; ++year) {
    auto table = select_table(dataset, request.selection, year, request.scope);
    if (table.total() == 0) {
      report.warnings.push_back(std::to_string(year) + ": zero_population (no graduates)");
      continue;
    }
    auto score = equitability(normalize(marginalize(table, request.axis)), k);
    report.points.push_back(SeriesPoint{year, score.percent(), std::string(to_string(request.axis)),
                                        Metric::Evenness, label});
  }
  return report;
}

EvennessComparison compare_evenness(const Dataset& dataset,
                                    const std::vector<std::string>& institutions, int year,
                                    const FieldScope& scope, std::optional<AwardLevel> award_level) {
  EvennessComparison out;
  const auto& scheme = dataset.scheme();
  auto ids = institutions.empty() ? dataset.institutions() : institutions;
  for (const auto& id : ids) {
    if (!dataset.has_institution(id)) {
      out.skipped.push_back({id, "unknown_institution"});
      continue;
    }
    auto table = select_table(dataset, Selection{{id}, award_level}, year, scope);
    if (table.total() == 0) {
      out.skipped.push_back({id, "zero_population"});
      continue;
    }
    auto score = [&](Axis axis) {
      return equitability(normalize(marginalize(table, axis)), scheme.size(axis)).percent();
    };
    out.rows.push_back(
        EvennessTriple{id, score(Axis::Gender), score(Axis::Race), score(Axis::Intersectional)});
  }
  return out;
}

GapReport gap_report(const Dataset& dataset, const Selection& selection, int year,
                     const FieldScope& program, const FieldScope& reference) {
  require_known(dataset, selection.institutions);
  GapReport report;
  report.rows = opportunity_gap(select_table(dataset, selection, year, program),
                                select_table(dataset, selection, year, reference));
  return report;
}

JsDistanceReport js_distance_report(const Dataset& dataset, const JsDistanceRequest& request) {
  JsDistanceReport report;
  auto ids = request.institutions.empty() ? dataset.institutions() : request.institutions;
  for (const auto& id : ids) {
    if (!dataset.has_institution(id)) {
      report.skipped.push_back({id, "unknown_institution"});
      continue;
    }
    Selection selection{{id}, request.award_level};
    auto program = select_table(dataset, selection, request.year, request.program);
    auto reference = select_table(dataset, selection, request.year, request.reference);
    if (program.total() == 0 || reference.total() == 0) {
      report.skipped.push_back(
          {id, program.total() == 0 ? "zero_population: program" : "zero_population: reference"});
      continue;
    }
    report.rows.push_back({id, js_distance(normalize(program), normalize(reference))});
  }
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const JsDistanceRow& a, const JsDistanceRow& b) {
                     return a.distance > b.distance;
                   });
  return report;
}

std::string MetricSpec::label() const {
  std::string out = std::string(to_string(metric)) + ":" + group.label();
  if (!(scope == FieldScope::computing())) out += "@" + scope.describe();
  return out;
}

MetricSpec parse_metric_spec(const CategoryScheme& scheme, std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw Error(ErrorKind::InvalidFilter, "metric spec must be 'standard:<group>' or 'cohort:<group>'",
                std::string(text));
  auto metric = parse_metric(text.substr(0, colon));
  if (!metric || (*metric != Metric::StandardShare && *metric != Metric::CohortShare))
    throw Error(ErrorKind::InvalidFilter, "comparison metric must be standard or cohort",
                std::string(text));
  auto rest = text.substr(colon + 1);
  MetricSpec spec;
  spec.metric = *metric;
  if (auto at = rest.find('@'); at != std::string_view::npos) {
    spec.scope = FieldScope::parse(rest.substr(at + 1));
    rest = rest.substr(0, at);
  }
  spec.group = parse_group(scheme, rest);
  return spec;
}

ComparisonReport compare_institutions(const Dataset& dataset,
                                      const std::vector<std::string>& institutions, int year,
                                      const std::vector<MetricSpec>& specs,
                                      std::optional<AwardLevel> award_level) {
  require_known(dataset, institutions);
  if (specs.empty()) throw Error(ErrorKind::InvalidFilter, "no comparison metrics given");
  ComparisonReport report{institutions, {}};
  for (const auto& spec : specs) {
    require_group(dataset.scheme(), spec.group);
    for (const auto& id : institutions) {
      Selection selection{{id}, award_level};
      ComparisonRow row{id, spec.label(), std::nullopt, std::nullopt};
      try {
        auto field = select_table(dataset, selection, year, spec.scope);
        row.value = spec.metric == Metric::CohortShare
                        ? cohort_share(field,
                                       select_table(dataset, selection, year,
                                                    FieldScope::all_degrees()),
                                       spec.group)
                        : standard_share(field, spec.group);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ZeroPopulation && e.kind() != ErrorKind::EmptyCohort) throw;
        row.error = std::string(e.name());
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

DistributionPair distribution_pair(const Dataset& dataset, const Selection& selection, int year,
                                   const FieldScope& program, const FieldScope& reference) {
  require_known(dataset, selection.institutions);
  std::string label;
  for (std::size_t i = 0; i < selection.institutions.size(); ++i)
    label += (i ? "+" : "") + selection.institutions[i];
  return DistributionPair{label, program.describe(), reference.describe(),
                          normalize(select_table(dataset, selection, year, program)),
                          normalize(select_table(dataset, selection, year, reference))};
}

double round1(double percent) noexcept { return std::round(percent * 10.0) / 10.0; }

}  // namespace gradlens
