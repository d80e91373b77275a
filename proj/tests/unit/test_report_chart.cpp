#include <doctest.h>

#include <random>
#include <regex>

#include <nlohmann/json.hpp>

#include "gradlens/chart.hpp"
#include "gradlens/error.hpp"
#include "gradlens/report_io.hpp"
#include "support.hpp"

using namespace gradlens;

namespace {

std::size_t occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

std::vector<SeriesPoint> random_points(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> value(0.0, 100.0);
  std::vector<SeriesPoint> points;
  for (int year = 2010; year < 2016; ++year)
    points.push_back({year, value(rng), "Hispanic or Latino,Women", Metric::CohortShare, "U\"1, x"});
  points.push_back({2020, 1.0 / 3.0, "Women", Metric::JSDistance, ""});
  return points;
}

std::vector<EvennessTriple> triples(std::size_t n) {
  std::vector<EvennessTriple> rows;
  for (std::size_t i = 0; i < n; ++i)
    rows.push_back({"U" + std::to_string(i + 1), 50.0 + i, 30.0 + i / 3.0, 40.0 + 0.1 * i});
  return rows;
}

std::vector<GapRow> gap_rows() {
  auto scheme = CategoryScheme::ipeds_default();
  std::vector<GapRow> rows;
  for (std::size_t i = 0; i < scheme.cell_count(); ++i) {
    const double p = 100.0 / 14 + (i % 2 ? 0.1 : -0.1), u = 100.0 / 14;
    rows.push_back({scheme.cell_at(i), p, u, p - u});
  }
  return rows;
}

DistributionPair pair() {
  auto labels = CategoryScheme::ipeds_default().labels(Axis::Intersectional);
  std::vector<double> p(14, 0.0), q(14, 1.0 / 14);
  p[0] = 0.25;
  p[3] = 0.75;
  return {"U5", "cip11", "all", Distribution(labels, p), Distribution(labels, q)};
}

}  // namespace

TEST_CASE("series CSV and JSON round-trip at full precision") {
  std::mt19937_64 rng(41);
  auto points = random_points(rng);
  CHECK(series_from_csv(series_csv(points)) == points);
  CHECK(nlohmann::json(points).get<std::vector<SeriesPoint>>() == points);
  CHECK(series_csv(points).starts_with("year,institution,group,metric,value\n"));
}

TEST_CASE("gap, evenness and distribution CSV round-trips") {
  auto gaps = gap_rows();
  CHECK(gap_from_csv(gap_csv(gaps)) == gaps);
  auto rows = triples(5);
  CHECK(evenness_from_csv(evenness_csv(rows)) == rows);
  auto dp = pair();
  CHECK(distribution_pair_from_csv(distribution_pair_csv(dp)) == dp);
  CHECK(distribution_pair_from_json(nlohmann::json(dp)) == dp);
}

TEST_CASE("report JSON carries warnings") {
  SeriesReport report{{{2020, 1.5, "Women", Metric::StandardShare, ""}}, {"no data for 2019"}};
  auto j = report_json(report);
  CHECK(j["points"].size() == 1);
  CHECK(j["warnings"][0] == "no data for 2019");
  CHECK(j["points"][0]["metric"] == "standard");
}

TEST_CASE("line chart: both year labels and each value appear as text") {
  std::vector<SeriesPoint> points{{2010, 12.5, "Women", Metric::CohortShare, ""},
                                  {2019, 18.25, "Women", Metric::CohortShare, ""}};
  auto svg = emit_chart({ChartKind::Line, "Women in CS", points, ChartFormat::Svg});
  CHECK(svg.starts_with("<svg"));
  CHECK(svg.find(">2010</text>") != std::string::npos);
  CHECK(svg.find(">2019</text>") != std::string::npos);
  CHECK(svg.find(">12.5</text>") != std::string::npos);
  CHECK(svg.find(">Women in CS</text>") != std::string::npos);
  CHECK(occurrences(svg, "class=\"series\"") == 1);
}

TEST_CASE("dumbbell: one row per institution with three markers") {
  auto svg = emit_chart({ChartKind::Dumbbell, "E_H", triples(12), ChartFormat::Svg});
  CHECK(occurrences(svg, "<g class=\"row\"") == 12);
  CHECK(occurrences(svg, "class=\"marker gender\"") == 12);
  CHECK(occurrences(svg, "class=\"marker race\"") == 12);
  CHECK(occurrences(svg, "class=\"marker intersectional\"") == 12);
  CHECK(svg.find("race (triangle)") != std::string::npos);
  CHECK(svg.find("gender (circle)") != std::string::npos);
  CHECK(svg.find("intersectional (diamond)") != std::string::npos);
  std::regex circle("<circle class=\"marker gender\"");
  std::regex triangle("<polygon class=\"marker race\"");
  CHECK(std::distance(std::sregex_iterator(svg.begin(), svg.end(), circle), std::sregex_iterator()) == 12);
  CHECK(std::distance(std::sregex_iterator(svg.begin(), svg.end(), triangle), std::sregex_iterator()) == 12);
}

TEST_CASE("grouped bar and distribution pair render") {
  auto bars = emit_chart({ChartKind::GroupedBar, "gap", gap_rows(), ChartFormat::Svg});
  CHECK(occurrences(bars, "<g class=\"cell\"") == 14);
  CHECK(bars.find("program degrees") != std::string::npos);
  auto two = emit_chart({ChartKind::DistributionPair, "U5", pair(), ChartFormat::Svg});
  CHECK(two.find(">program: cip11") != std::string::npos);
  CHECK(two.find(">reference: all") != std::string::npos);
}

TEST_CASE("chart JSON and CSV exports re-parse to the same payload") {
  std::mt19937_64 rng(42);
  std::vector<ChartSpec> specs{
      {ChartKind::Line, "t", random_points(rng), ChartFormat::Json},
      {ChartKind::Dumbbell, "t", triples(3), ChartFormat::Json},
      {ChartKind::GroupedBar, "t", gap_rows(), ChartFormat::Json},
      {ChartKind::DistributionPair, "t", pair(), ChartFormat::Json},
  };
  for (auto spec : specs) {
    CAPTURE(to_string(spec.kind));
    CHECK(parse_chart_payload(spec.kind, ChartFormat::Json, emit_chart(spec)) == spec.payload);
    spec.format = ChartFormat::Csv;
    CHECK(parse_chart_payload(spec.kind, ChartFormat::Csv, emit_chart(spec)) == spec.payload);
  }
  auto j = nlohmann::json::parse(emit_chart(specs[1]));
  CHECK(j["kind"] == "dumbbell");
  CHECK(j["title"] == "t");
}

TEST_CASE("chart errors") {
  auto kind_of = [](const ChartSpec& spec) {
    try {
      emit_chart(spec);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  CHECK(kind_of({ChartKind::Line, "x", std::vector<SeriesPoint>{}, ChartFormat::Svg}) == ErrorKind::EmptyPayload);
  CHECK(kind_of({ChartKind::Line, "x", triples(2), ChartFormat::Svg}) == ErrorKind::InvalidFilter);
  CHECK(kind_of({ChartKind::Dumbbell, "x", gap_rows(), ChartFormat::Svg}) == ErrorKind::InvalidFilter);
  CHECK(parse_chart_kind("bar") == ChartKind::GroupedBar);
  CHECK(parse_chart_kind("pair") == ChartKind::DistributionPair);
  CHECK_FALSE(parse_chart_kind("pie").has_value());
}

TEST_CASE("SVG text is escaped") {
  std::vector<SeriesPoint> points{{2010, 1.0, "A<B & C", Metric::CohortShare, ""}};
  auto svg = emit_chart({ChartKind::Line, "x < y", points, ChartFormat::Svg});
  CHECK(svg.find("x &lt; y") != std::string::npos);
  CHECK(svg.find("A&lt;B &amp; C") != std::string::npos);
}
