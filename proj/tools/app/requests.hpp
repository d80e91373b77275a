#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "gradlens/analysis.hpp"
#include "gradlens/dataset.hpp"
#include "gradlens/error.hpp"

// Named-parameter front end to the analysis module. The CLI turns its flags
// into a Params map and the HTTP service passes query strings through
// unchanged, so both reach the same functions and emit the same JSON.

namespace gradlens::app {

using Params = std::map<std::string, std::string, std::less<>>;

enum class Endpoint { Institutions, Scheme, Standard, Cohort, Series, Gap, Evenness, JsDistance, Compare };

std::optional<Endpoint> parse_endpoint(std::string_view name) noexcept;
std::string_view to_string(Endpoint endpoint) noexcept;
const std::vector<std::string>& allowed_params(Endpoint endpoint);

/// A bad, missing or unknown parameter.
class ParamError : public std::runtime_error {
 public:
  ParamError(std::string name, std::string message, std::string parameter)
      : std::runtime_error(std::move(message)), name_(std::move(name)),
        parameter_(std::move(parameter)) {}
  const std::string& name() const noexcept { return name_; }
  const std::string& parameter() const noexcept { return parameter_; }

 private:
  std::string name_;
  std::string parameter_;
};

/// A library error raised while interpreting one parameter.
class ParamDataError : public Error {
 public:
  ParamDataError(const Error& e, std::string parameter)
      : Error(e.kind(), e.what(), e.context()), parameter_(std::move(parameter)) {}
  const std::string& parameter() const noexcept { return parameter_; }

 private:
  std::string parameter_;
};

/// Rejects parameters the endpoint does not know (ParamError "unknown_parameter").
void check_params(Endpoint endpoint, const Params& params);

struct ShareResult {
  Metric metric = Metric::StandardShare;
  Group group;
  std::vector<std::string> institutions;
  int year = 0;
  FieldScope scope = FieldScope::computing();
  FieldScope reference = FieldScope::all_degrees();
  double value = 0.0;
};

ShareResult run_share(const Dataset& dataset, Metric metric, const Params& params);
SeriesReport run_series(const Dataset& dataset, const Params& params);
GapReport run_gap(const Dataset& dataset, const Params& params);
/// A series when `years` is given, otherwise a per-institution triple comparison.
std::variant<SeriesReport, EvennessComparison> run_evenness(const Dataset& dataset,
                                                            const Params& params);
JsDistanceReport run_jsdistance(const Dataset& dataset, const Params& params);
ComparisonReport run_compare(const Dataset& dataset, const Params& params);
DistributionPair run_pair(const Dataset& dataset, const Params& params);

nlohmann::json share_json(const ShareResult& result);
nlohmann::json institutions_json(const Dataset& dataset);
nlohmann::json scheme_json(const CategoryScheme& scheme);

/// Checks parameters, runs the endpoint and returns the response body,
/// including the dataset digest.
nlohmann::json run_endpoint(const Dataset& dataset, Endpoint endpoint, const Params& params);

/// Pretty-printed form shared by `--format json` and the HTTP API.
std::string dump_body(const nlohmann::json& body);

/// Parameter helpers, exposed for the CLI's chart export.
std::vector<std::string> param_institutions(const Params& params);
int param_year(const Params& params);
YearRange param_years(const Params& params);
FieldScope param_scope(const Params& params, std::string_view name, FieldScope fallback);
std::optional<AwardLevel> param_award_level(const Params& params);
Group param_group(const Dataset& dataset, const Params& params);
Axis param_axis(const Params& params, Axis fallback);

}  // namespace gradlens::app
