#include "gradlens/report_io.hpp"

#include <charconv>

#include "csv.hpp"
#include "gradlens/error.hpp"

namespace gradlens {
namespace {

using nlohmann::json;

double parse_double(const std::string& text, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw Error(ErrorKind::MalformedRow, "bad number '" + text + "'", "line " + std::to_string(line));
  return value;
}

int parse_year(const std::string& text, std::size_t line) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw Error(ErrorKind::MalformedRow, "bad year '" + text + "'", "line " + std::to_string(line));
  return value;
}

// Calls row(fields, line_no) for each data line after checking the header.
template <typename RowFn>
void for_each_row(std::string_view text, std::string_view header, std::size_t width, RowFn row) {
  auto lines = detail::split_lines(text);
  if (lines.empty() || lines.front() != header)
    throw Error(ErrorKind::MissingColumn, "expected header '" + std::string(header) + "'");
  std::vector<std::string> f;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    if (!detail::split_csv_line(lines[i], f) || f.size() != width)
      throw Error(ErrorKind::MalformedRow, "wrong field count", "line " + std::to_string(i + 1));
    row(f, i + 1);
  }
}

std::string join_row(std::initializer_list<std::string> fields) {
  std::string out;
  bool first = true;
  for (const auto& f : fields) {
    if (!first) out += ',';
    out += detail::csv_field(f);
    first = false;
  }
  out += '\n';
  return out;
}

constexpr std::string_view kSeriesHeader = "year,institution,group,metric,value";
constexpr std::string_view kGapHeader = "race,gender,program_share,university_share,gap";
constexpr std::string_view kEvennessHeader = "institution,gender,race,intersectional";
constexpr std::string_view kPairHeader = "institution,scope,cell,probability";

}  // namespace

void to_json(json& j, const SeriesPoint& p) {
  j = json{{"year", p.year},
           {"value", p.value},
           {"group", p.group},
           {"metric", to_string(p.metric)},
           {"institution", p.institution}};
}

void from_json(const json& j, SeriesPoint& p) {
  p.year = j.at("year").get<int>();
  p.value = j.at("value").get<double>();
  p.group = j.at("group").get<std::string>();
  auto metric = parse_metric(j.at("metric").get<std::string>());
  if (!metric) throw Error(ErrorKind::MalformedRow, "unknown metric in series point");
  p.metric = *metric;
  p.institution = j.value("institution", std::string());
}

void to_json(json& j, const GapRow& row) {
  j = json{{"race", row.cell.race},
           {"gender", row.cell.gender},
           {"cell", cell_label(row.cell)},
           {"program_share", row.program_share},
           {"university_share", row.university_share},
           {"gap", row.gap}};
}

void from_json(const json& j, GapRow& row) {
  row.cell = Cell{j.at("gender").get<std::string>(), j.at("race").get<std::string>()};
  row.program_share = j.at("program_share").get<double>();
  row.university_share = j.at("university_share").get<double>();
  row.gap = j.at("gap").get<double>();
}

void to_json(json& j, const EvennessTriple& row) {
  j = json{{"institution", row.institution},
           {"gender", row.gender},
           {"race", row.race},
           {"intersectional", row.intersectional}};
}

void from_json(const json& j, EvennessTriple& row) {
  row.institution = j.at("institution").get<std::string>();
  row.gender = j.at("gender").get<double>();
  row.race = j.at("race").get<double>();
  row.intersectional = j.at("intersectional").get<double>();
}

void to_json(json& j, const JsDistanceRow& row) {
  j = json{{"institution", row.institution}, {"distance", row.distance}};
}

void from_json(const json& j, JsDistanceRow& row) {
  row.institution = j.at("institution").get<std::string>();
  row.distance = j.at("distance").get<double>();
}

void to_json(json& j, const SkippedInstitution& s) {
  j = json{{"institution", s.institution}, {"reason", s.reason}};
}

void from_json(const json& j, SkippedInstitution& s) {
  s.institution = j.at("institution").get<std::string>();
  s.reason = j.at("reason").get<std::string>();
}

void to_json(json& j, const ComparisonRow& row) {
  j = json{{"institution", row.institution},
           {"metric", row.metric},
           {"value", row.value ? json(*row.value) : json(nullptr)},
           {"error", row.error ? json(*row.error) : json(nullptr)}};
}

void from_json(const json& j, ComparisonRow& row) {
  row.institution = j.at("institution").get<std::string>();
  row.metric = j.at("metric").get<std::string>();
  row.value = j.at("value").is_null() ? std::nullopt : std::optional(j["value"].get<double>());
  row.error =
      j.at("error").is_null() ? std::nullopt : std::optional(j["error"].get<std::string>());
}

void to_json(json& j, const Distribution& d) {
  j = json{{"labels", d.labels()},
           {"probabilities", std::vector<double>(d.probabilities().begin(), d.probabilities().end())}};
}

Distribution distribution_from_json(const json& j) {
  return Distribution(j.at("labels").get<std::vector<std::string>>(),
                      j.at("probabilities").get<std::vector<double>>());
}

void to_json(json& j, const DistributionPair& pair) {
  j = json{{"institution", pair.institution},
           {"program_label", pair.program_label},
           {"reference_label", pair.reference_label},
           {"program", pair.program},
           {"reference", pair.reference}};
}

DistributionPair distribution_pair_from_json(const json& j) {
  return DistributionPair{j.at("institution").get<std::string>(),
                          j.at("program_label").get<std::string>(),
                          j.at("reference_label").get<std::string>(),
                          distribution_from_json(j.at("program")),
                          distribution_from_json(j.at("reference"))};
}

json report_json(const SeriesReport& report) {
  return json{{"points", report.points}, {"warnings", report.warnings}};
}

json report_json(const GapReport& report) {
  return json{{"rows", report.rows}, {"warnings", report.warnings}};
}

json report_json(const EvennessComparison& report) {
  json warnings = json::array();
  for (const auto& s : report.skipped) warnings.push_back(s.institution + ": " + s.reason);
  return json{{"rows", report.rows}, {"skipped", report.skipped}, {"warnings", warnings}};
}

json report_json(const JsDistanceReport& report) {
  json warnings = json::array();
  for (const auto& s : report.skipped) warnings.push_back(s.institution + ": " + s.reason);
  return json{{"rows", report.rows}, {"skipped", report.skipped}, {"warnings", warnings}};
}

json report_json(const ComparisonReport& report) {
  json warnings = json::array();
  for (const auto& row : report.rows)
    if (row.error) warnings.push_back(row.institution + " " + row.metric + ": " + *row.error);
  return json{{"institutions", report.institutions}, {"rows", report.rows}, {"warnings", warnings}};
}

std::string series_csv(const std::vector<SeriesPoint>& points) {
  std::string out = std::string(kSeriesHeader) + "\n";
  for (const auto& p : points)
    out += join_row({std::to_string(p.year), p.institution, p.group, std::string(to_string(p.metric)),
                     detail::format_double(p.value)});
  return out;
}

std::vector<SeriesPoint> series_from_csv(std::string_view text) {
  std::vector<SeriesPoint> out;
  for_each_row(text, kSeriesHeader, 5, [&](const std::vector<std::string>& f, std::size_t line) {
    auto metric = parse_metric(f[3]);
    if (!metric)
      throw Error(ErrorKind::MalformedRow, "unknown metric", "line " + std::to_string(line));
    out.push_back(SeriesPoint{parse_year(f[0], line), parse_double(f[4], line), f[2], *metric, f[1]});
  });
  return out;
}

std::string gap_csv(const std::vector<GapRow>& rows) {
  std::string out = std::string(kGapHeader) + "\n";
  for (const auto& r : rows)
    out += join_row({r.cell.race, r.cell.gender, detail::format_double(r.program_share),
                     detail::format_double(r.university_share), detail::format_double(r.gap)});
  return out;
}

std::vector<GapRow> gap_from_csv(std::string_view text) {
  std::vector<GapRow> out;
  for_each_row(text, kGapHeader, 5, [&](const std::vector<std::string>& f, std::size_t line) {
    out.push_back(GapRow{Cell{f[1], f[0]}, parse_double(f[2], line), parse_double(f[3], line),
                         parse_double(f[4], line)});
  });
  return out;
}

std::string evenness_csv(const std::vector<EvennessTriple>& rows) {
  std::string out = std::string(kEvennessHeader) + "\n";
  for (const auto& r : rows)
    out += join_row({r.institution, detail::format_double(r.gender), detail::format_double(r.race),
                     detail::format_double(r.intersectional)});
  return out;
}

std::vector<EvennessTriple> evenness_from_csv(std::string_view text) {
  std::vector<EvennessTriple> out;
  for_each_row(text, kEvennessHeader, 4, [&](const std::vector<std::string>& f, std::size_t line) {
    out.push_back(EvennessTriple{f[0], parse_double(f[1], line), parse_double(f[2], line),
                                 parse_double(f[3], line)});
  });
  return out;
}

std::string distribution_pair_csv(const DistributionPair& pair) {
  std::string out = std::string(kPairHeader) + "\n";
  for (std::size_t i = 0; i < pair.program.size(); ++i)
    out += join_row({pair.institution, pair.program_label, pair.program.labels()[i],
                     detail::format_double(pair.program[i])});
  for (std::size_t i = 0; i < pair.reference.size(); ++i)
    out += join_row({pair.institution, pair.reference_label, pair.reference.labels()[i],
                     detail::format_double(pair.reference[i])});
  return out;
}

DistributionPair distribution_pair_from_csv(std::string_view text) {
  std::string institution;
  std::vector<std::string> scopes;
  std::vector<std::vector<std::string>> labels(2);
  std::vector<std::vector<double>> probabilities(2);
  for_each_row(text, kPairHeader, 4, [&](const std::vector<std::string>& f, std::size_t line) {
    institution = f[0];
    if (scopes.empty() || (scopes.size() == 1 && scopes.back() != f[1])) scopes.push_back(f[1]);
    std::size_t side = scopes.size() - 1;
    if (f[1] != scopes[side])
      throw Error(ErrorKind::MalformedRow, "more than two scopes", "line " + std::to_string(line));
    labels[side].push_back(f[2]);
    probabilities[side].push_back(parse_double(f[3], line));
  });
  if (scopes.size() != 2) throw Error(ErrorKind::EmptyPayload, "distribution pair needs two scopes");
  return DistributionPair{institution, scopes[0], scopes[1],
                          Distribution(labels[0], probabilities[0]),
                          Distribution(labels[1], probabilities[1])};
}

std::string js_distance_csv(const JsDistanceReport& report) {
  std::string out = "rank,institution,distance\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i)
    out += join_row({std::to_string(i + 1), report.rows[i].institution,
                     detail::format_double(report.rows[i].distance)});
  return out;
}

std::string comparison_csv(const ComparisonReport& report) {
  std::string out = "institution,metric,value,error\n";
  for (const auto& r : report.rows)
    out += join_row({r.institution, r.metric, r.value ? detail::format_double(*r.value) : "",
                     r.error.value_or("")});
  return out;
}

}  // namespace gradlens
