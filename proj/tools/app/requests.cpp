#include "requests.hpp"

#include <algorithm>
#include <charconv>

#include "gradlens/report_io.hpp"

namespace gradlens::app {
namespace {

using nlohmann::json;

const std::string* find(const Params& params, std::string_view name) {
  auto it = params.find(name);
  if (it == params.end() || it->second.empty()) return nullptr;
  return &it->second;
}

const std::string& require(const Params& params, std::string_view name) {
  if (auto* v = find(params, name)) return *v;
  throw ParamError("missing_parameter", "parameter '" + std::string(name) + "' is required",
                   std::string(name));
}

template <typename Fn>
auto interpret(std::string_view name, Fn fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ParamError&) {
    throw;
  } catch (const Error& e) {
    throw ParamDataError(e, std::string(name));
  }
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  while (true) {
    auto pos = text.find(sep);
    auto part = text.substr(0, pos);
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    if (!part.empty()) out.emplace_back(part);
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return out;
}

bool param_flag(const Params& params, std::string_view name) {
  auto* v = find(params, name);
  return v && (*v == "1" || *v == "true" || *v == "yes");
}

Selection selection_of(const Params& params) {
  return Selection{param_institutions(params), param_award_level(params)};
}

}  // namespace

std::optional<Endpoint> parse_endpoint(std::string_view name) noexcept {
  for (auto e : {Endpoint::Institutions, Endpoint::Scheme, Endpoint::Standard, Endpoint::Cohort,
                 Endpoint::Series, Endpoint::Gap, Endpoint::Evenness, Endpoint::JsDistance,
                 Endpoint::Compare})
    if (name == to_string(e)) return e;
  return std::nullopt;
}

std::string_view to_string(Endpoint endpoint) noexcept {
  switch (endpoint) {
    case Endpoint::Institutions: return "institutions";
    case Endpoint::Scheme: return "scheme";
    case Endpoint::Standard: return "standard";
    case Endpoint::Cohort: return "cohort";
    case Endpoint::Series: return "series";
    case Endpoint::Gap: return "gap";
    case Endpoint::Evenness: return "evenness";
    case Endpoint::JsDistance: return "jsdistance";
    case Endpoint::Compare: return "compare";
  }
  return "?";
}

const std::vector<std::string>& allowed_params(Endpoint endpoint) {
  static const std::vector<std::string> none;
  static const std::vector<std::string> standard{"institution", "year", "group", "scope",
                                                 "award-level"};
  static const std::vector<std::string> cohort{"institution", "year",            "group",
                                               "scope",       "reference-scope", "award-level"};
  static const std::vector<std::string> series{"metric", "group",           "institution",
                                               "years",  "scope",           "reference-scope",
                                               "award-level", "per-institution"};
  static const std::vector<std::string> gap{"institution", "year", "scope", "reference-scope",
                                            "award-level"};
  static const std::vector<std::string> evenness{"institution", "axis",  "years",
                                                 "year",        "scope", "award-level"};
  static const std::vector<std::string> jsdistance{"institution", "year", "scope",
                                                   "reference-scope", "award-level"};
  static const std::vector<std::string> compare{"institution", "year", "metric", "award-level"};
  switch (endpoint) {
    case Endpoint::Institutions:
    case Endpoint::Scheme: return none;
    case Endpoint::Standard: return standard;
    case Endpoint::Cohort: return cohort;
    case Endpoint::Series: return series;
    case Endpoint::Gap: return gap;
    case Endpoint::Evenness: return evenness;
    case Endpoint::JsDistance: return jsdistance;
    case Endpoint::Compare: return compare;
  }
  return none;
}

void check_params(Endpoint endpoint, const Params& params) {
  const auto& allowed = allowed_params(endpoint);
  for (const auto& [name, value] : params)
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
      throw ParamError("unknown_parameter",
                       "'" + name + "' is not a parameter of " + std::string(to_string(endpoint)),
                       name);
}

std::vector<std::string> param_institutions(const Params& params) {
  auto* v = find(params, "institution");
  return v ? split(*v, ',') : std::vector<std::string>{};
}

int param_year(const Params& params) {
  const auto& text = require(params, "year");
  int year = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), year);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ParamError("invalid_parameter", "year must be an integer", "year");
  return year;
}

YearRange param_years(const Params& params) {
  const auto& text = require(params, "years");
  return interpret("years", [&] { return YearRange::parse(text); });
}

FieldScope param_scope(const Params& params, std::string_view name, FieldScope fallback) {
  auto* v = find(params, name);
  if (!v) return fallback;
  return interpret(name, [&] { return FieldScope::parse(*v); });
}

std::optional<AwardLevel> param_award_level(const Params& params) {
  auto* v = find(params, "award-level");
  if (!v) return AwardLevel::Bachelors;
  if (*v == "any") return std::nullopt;
  if (auto level = parse_award_level(*v)) return level;
  throw ParamError("invalid_parameter", "award-level must be one of certificate, associates, "
                                        "bachelors, masters, doctoral, other, any",
                   "award-level");
}

Group param_group(const Dataset& dataset, const Params& params) {
  const auto& text = require(params, "group");
  return interpret("group", [&] { return parse_group(dataset.scheme(), text); });
}

Axis param_axis(const Params& params, Axis fallback) {
  auto* v = find(params, "axis");
  if (!v) return fallback;
  if (auto axis = parse_axis(*v)) return *axis;
  throw ParamError("invalid_parameter", "axis must be gender, race or intersectional", "axis");
}

ShareResult run_share(const Dataset& dataset, Metric metric, const Params& params) {
  ShareResult r;
  r.metric = metric;
  r.group = param_group(dataset, params);
  r.institutions = param_institutions(params);
  r.year = param_year(params);
  r.scope = param_scope(params, "scope", FieldScope::computing());
  r.reference = param_scope(params, "reference-scope", FieldScope::all_degrees());
  Selection selection{r.institutions, param_award_level(params)};
  interpret("institution", [&] {
    for (const auto& id : r.institutions)
      if (!dataset.has_institution(id))
        throw Error(ErrorKind::UnknownInstitution, "institution not in dataset", id);
    return 0;
  });
  auto field = select_table(dataset, selection, r.year, r.scope);
  r.value = metric == Metric::CohortShare
                ? cohort_share(field, select_table(dataset, selection, r.year, r.reference), r.group)
                : standard_share(field, r.group);
  return r;
}

SeriesReport run_series(const Dataset& dataset, const Params& params) {
  SeriesRequest request;
  if (auto* m = find(params, "metric")) {
    auto metric = parse_metric(*m);
    if (!metric || *metric == Metric::Evenness)
      throw ParamError("invalid_parameter", "series metric must be standard, cohort or jsdistance",
                       "metric");
    request.metric = *metric;
  }
  if (request.metric == Metric::JSDistance && !find(params, "group"))
    request.group = Group::of_gender(dataset.scheme().genders().front());
  else
    request.group = param_group(dataset, params);
  request.selection = selection_of(params);
  request.scope = param_scope(params, "scope", FieldScope::computing());
  request.reference = param_scope(params, "reference-scope", FieldScope::all_degrees());
  request.years = param_years(params);
  request.per_institution = param_flag(params, "per-institution");
  return interpret("institution", [&] { return series(dataset, request); });
}

GapReport run_gap(const Dataset& dataset, const Params& params) {
  auto selection = selection_of(params);
  int year = param_year(params);
  auto program = param_scope(params, "scope", FieldScope::computing());
  auto reference = param_scope(params, "reference-scope", FieldScope::all_degrees());
  return interpret("institution",
                   [&] { return gap_report(dataset, selection, year, program, reference); });
}

std::variant<SeriesReport, EvennessComparison> run_evenness(const Dataset& dataset,
                                                            const Params& params) {
  auto scope = param_scope(params, "scope", FieldScope::computing());
  if (find(params, "years")) {
    EvennessRequest request{selection_of(params), param_axis(params, Axis::Intersectional), scope,
                            param_years(params)};
    return interpret("institution", [&] { return evenness_series(dataset, request); });
  }
  if (!find(params, "year"))
    throw ParamError("missing_parameter", "evenness needs 'years' (series) or 'year' (comparison)",
                     "years");
  return compare_evenness(dataset, param_institutions(params), param_year(params), scope,
                          param_award_level(params));
}

JsDistanceReport run_jsdistance(const Dataset& dataset, const Params& params) {
  JsDistanceRequest request;
  request.institutions = param_institutions(params);
  request.year = param_year(params);
  request.program = param_scope(params, "scope", FieldScope::computing());
  request.reference = param_scope(params, "reference-scope", FieldScope::all_degrees());
  request.award_level = param_award_level(params);
  return js_distance_report(dataset, request);
}

ComparisonReport run_compare(const Dataset& dataset, const Params& params) {
  auto institutions = param_institutions(params);
  if (institutions.empty())
    throw ParamError("missing_parameter", "compare needs at least one institution", "institution");
  int year = param_year(params);
  std::vector<MetricSpec> specs;
  for (const auto& text : split(require(params, "metric"), ';'))
    specs.push_back(interpret("metric", [&] { return parse_metric_spec(dataset.scheme(), text); }));
  return interpret("institution", [&] {
    return compare_institutions(dataset, institutions, year, specs, param_award_level(params));
  });
}

DistributionPair run_pair(const Dataset& dataset, const Params& params) {
  auto selection = selection_of(params);
  int year = param_year(params);
  auto program = param_scope(params, "scope", FieldScope::computing());
  auto reference = param_scope(params, "reference-scope", FieldScope::all_degrees());
  return interpret("institution",
                   [&] { return distribution_pair(dataset, selection, year, program, reference); });
}

json share_json(const ShareResult& r) {
  return json{{"metric", to_string(r.metric)},
              {"group", r.group.label()},
              {"institutions", r.institutions},
              {"year", r.year},
              {"scope", r.scope.describe()},
              {"reference_scope", r.reference.describe()},
              {"value", r.value},
              {"warnings", json::array()}};
}

json institutions_json(const Dataset& dataset) {
  json rows = json::array();
  for (const auto& id : dataset.institutions()) {
    auto years = dataset.institution_years(id);
    auto name = dataset.institution_name(id);
    rows.push_back({{"id", id},
                    {"name", name ? json(*name) : json(nullptr)},
                    {"first_year", years ? json(years->first) : json(nullptr)},
                    {"last_year", years ? json(years->last) : json(nullptr)}});
  }
  return json{{"institutions", rows}, {"warnings", json::array()}};
}

json scheme_json(const CategoryScheme& scheme) {
  return json{{"genders", scheme.genders()},
              {"races", scheme.races()},
              {"cells", scheme.labels(Axis::Intersectional)},
              {"k",
               {{"gender", scheme.size(Axis::Gender)},
                {"race", scheme.size(Axis::Race)},
                {"intersectional", scheme.size(Axis::Intersectional)}}},
              {"extras",
               {{"nonresident", scheme.extras().nonresident},
                {"unknown", scheme.extras().unknown}}},
              {"warnings", json::array()}};
}

json run_endpoint(const Dataset& dataset, Endpoint endpoint, const Params& params) {
  check_params(endpoint, params);
  json body;
  switch (endpoint) {
    case Endpoint::Institutions: body = institutions_json(dataset); break;
    case Endpoint::Scheme: body = scheme_json(dataset.scheme()); break;
    case Endpoint::Standard: body = share_json(run_share(dataset, Metric::StandardShare, params)); break;
    case Endpoint::Cohort: body = share_json(run_share(dataset, Metric::CohortShare, params)); break;
    case Endpoint::Series: body = report_json(run_series(dataset, params)); break;
    case Endpoint::Gap: body = report_json(run_gap(dataset, params)); break;
    case Endpoint::Evenness:
      body = std::visit([](const auto& r) { return report_json(r); }, run_evenness(dataset, params));
      break;
    case Endpoint::JsDistance: body = report_json(run_jsdistance(dataset, params)); break;
    case Endpoint::Compare: body = report_json(run_compare(dataset, params)); break;
  }
  body["endpoint"] = to_string(endpoint);
  body["dataset_digest"] = dataset.digest();
  return body;
}

std::string dump_body(const json& body) { return body.dump(2) + "\n"; }

}  // namespace gradlens::app
