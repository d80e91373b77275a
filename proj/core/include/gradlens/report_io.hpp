#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gradlens/analysis.hpp"

// JSON and CSV forms of the report types. The CLI's --format json output and
// the HTTP API bodies are both built from these functions, so the two
// interfaces serialize identically. CSV values are written at full
// round-trip precision.

namespace gradlens {

void to_json(nlohmann::json& j, const SeriesPoint& p);
void from_json(const nlohmann::json& j, SeriesPoint& p);
void to_json(nlohmann::json& j, const GapRow& row);
void from_json(const nlohmann::json& j, GapRow& row);
void to_json(nlohmann::json& j, const EvennessTriple& row);
void from_json(const nlohmann::json& j, EvennessTriple& row);
void to_json(nlohmann::json& j, const JsDistanceRow& row);
void from_json(const nlohmann::json& j, JsDistanceRow& row);
void to_json(nlohmann::json& j, const SkippedInstitution& s);
void from_json(const nlohmann::json& j, SkippedInstitution& s);
void to_json(nlohmann::json& j, const ComparisonRow& row);
void from_json(const nlohmann::json& j, ComparisonRow& row);
void to_json(nlohmann::json& j, const Distribution& d);
Distribution distribution_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const DistributionPair& pair);
DistributionPair distribution_pair_from_json(const nlohmann::json& j);

nlohmann::json report_json(const SeriesReport& report);
nlohmann::json report_json(const GapReport& report);
nlohmann::json report_json(const EvennessComparison& report);
nlohmann::json report_json(const JsDistanceReport& report);
nlohmann::json report_json(const ComparisonReport& report);

std::string series_csv(const std::vector<SeriesPoint>& points);
std::vector<SeriesPoint> series_from_csv(std::string_view text);
std::string gap_csv(const std::vector<GapRow>& rows);
std::vector<GapRow> gap_from_csv(std::string_view text);
std::string evenness_csv(const std::vector<EvennessTriple>& rows);
std::vector<EvennessTriple> evenness_from_csv(std::string_view text);
std::string distribution_pair_csv(const DistributionPair& pair);
DistributionPair distribution_pair_from_csv(std::string_view text);
std::string js_distance_csv(const JsDistanceReport& report);
std::string comparison_csv(const ComparisonReport& report);

}  // namespace gradlens
