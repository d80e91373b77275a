// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "app/api_service.hpp"
#include "gradlens/analysis.hpp"
#include "gradlens/ingest.hpp"
#include "gradlens/metrics.hpp"
#include "support.hpp"

using namespace gradlens;
using gradlens::testing::TempDir;

namespace {

const CategoryScheme kScheme = CategoryScheme::ipeds_default();
const std::string kHispanic = "Hispanic or Latino";
const std::string kBlack = "Black or African American";

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int decimals = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

Distribution dist_of(const std::vector<std::uint64_t>& counts) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < counts.size(); ++i) labels.push_back("c" + std::to_string(i));
  return normalize(CountTable(CategoryScheme({"G"}, labels), Axis::Intersectional, counts));
}

Distribution uniform(std::size_t k) {
  std::vector<std::uint64_t> counts(k, 1);
  return dist_of(counts);
}

CountTable table_of(std::vector<std::uint64_t> counts) {
  return CountTable(kScheme, Axis::Intersectional, std::move(counts));
}

Outcome equitability_extremes() {
  Outcome o;
  const auto start = Clock::now();
  for (std::size_t k : {2u, 7u, 14u}) {
    const auto even = equitability(uniform(k), k).value;
    o.require(std::abs(even - 1.0) <= 1e-12, "uniform k=" + std::to_string(k) + " gave " + fmt(even, 15));
    std::vector<std::uint64_t> one(k, 0);
    one[k / 2] = 42;
    const auto degenerate = equitability(dist_of(one), k).value;
    o.require(degenerate == 0.0, "degenerate k=" + std::to_string(k) + " gave " + fmt(degenerate, 15));
  }
  const auto split = normalize(CountTable(kScheme, Axis::Gender, {500, 500}));
  const double percent = equitability(split, 2).percent();
  o.require(std::abs(percent - 100.0) <= 1e-10, "50/50 gender split gave " + fmt(percent, 12));
  const double elapsed = seconds_since(start);
  o.require(elapsed < 1.0, "took " + fmt(elapsed, 3) + " s");
  if (o.pass) o.detail = "k in {2,7,14}; 50/50 split = " + fmt(percent, 1) + "%; " + fmt(elapsed, 4) + " s";
  return o;
}

Outcome entropy_oracle() {
  Outcome o;
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> size(1, 14);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto counts = testing::random_counts(rng, size(rng), 100000);
    long double total = 0;
    for (auto c : counts) total += c;
    long double oracle = 0;
    for (auto c : counts)
      if (c) {
        const long double p = c / total;
        oracle -= p * std::log(p);
      }
    const double got = shannon_entropy(dist_of(counts)).value;
    worst = std::max(worst, static_cast<double>(std::fabs(got - oracle)));
  }
  o.require(worst <= 1e-12, "max error " + std::to_string(worst) + " nats");
  if (o.pass) o.detail = "10^4 vectors, max |error| = " + fmt(worst * 1e15, 2) + "e-15 nats";
  return o;
}

Outcome js_properties() {
  Outcome o;
  const auto start = Clock::now();
  const double ln2 = std::log(2.0);
  std::mt19937_64 rng(102);
  double worst_triangle = -1.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto p = dist_of(testing::random_counts(rng, 14));
    const auto q = dist_of(testing::random_counts(rng, 14));
    const auto r = dist_of(testing::random_counts(rng, 14));
    o.require(std::abs(jensen_shannon_divergence(p, p).value) <= 1e-12, "identity violated");
    o.require(js_distance(p, q) == js_distance(q, p), "symmetry violated");
    const double jsd = jensen_shannon_divergence(p, q).value;
    o.require(jsd >= 0.0 && jsd <= ln2 + 1e-12, "bound violated: " + fmt(jsd, 15));
    const double slack = js_distance(p, r) - js_distance(p, q) - js_distance(q, r);
    worst_triangle = std::max(worst_triangle, slack);
    o.require(slack <= 1e-12, "triangle inequality violated by " + fmt(slack, 15));
  }
  std::vector<std::uint64_t> left(14, 0), right(14, 0);
  for (std::size_t i = 0; i < 7; ++i) {
    left[i] = i + 1;
    right[i + 7] = 3;
  }
  const double disjoint = js_distance(dist_of(left), dist_of(right));
  o.require(std::abs(disjoint - std::sqrt(ln2)) <= 1e-12, "disjoint pair gave " + fmt(disjoint, 15));
  const double elapsed = seconds_since(start);
  o.require(elapsed < 10.0, "took " + fmt(elapsed, 3) + " s");
  if (o.pass)
    o.detail = "10^4 triples; disjoint = " + fmt(disjoint, 12) + "; " + fmt(elapsed, 3) + " s";
  return o;
}

Outcome two_institution_cohorts(const TempDir& dir) {
  Outcome o;
  const auto dataset = testing::load_fixture(dir, "table12");
  const auto path = (dir / "table12").string();
  app::ApiService api(dataset);

  const auto cs = select_table(dataset, {{"INST1"}, AwardLevel::Bachelors}, 2020, FieldScope::computing());
  const auto cs2 = select_table(dataset, {{"INST2"}, AwardLevel::Bachelors}, 2020, FieldScope::computing());
  o.require(cs.total() == 112 && cs2.total() == 580, "CS totals are not 112/580");

  struct Case {
    const char* group;
    const char* inst;
    double expected;
  };
  std::string values;
  for (auto c : {Case{"Hispanic", "INST1", 3.2}, Case{"Hispanic", "INST2", 3.4},
                 Case{"Hispanic,Women", "INST1", 0.9}, Case{"Hispanic,Women", "INST2", 2.7},
                 Case{"Hispanic,Men", "INST1", 6.4}, Case{"Hispanic,Men", "INST2", 4.3}}) {
    const auto body = api.handle("/api/cohort", {{"group", c.group}, {"institution", c.inst}, {"year", "2020"}});
    double via_api = NAN;
    if (body.status == 200) via_api = nlohmann::json::parse(body.body)["value"].get<double>();
    const auto run = testing::run_gradlens("cohort -d '" + path + "' -g '" + c.group + "' -i " + c.inst +
                                           " -y 2020 -f json");
    double via_cli = NAN;
    if (run.status == 0) via_cli = nlohmann::json::parse(run.out)["value"].get<double>();
    const std::string label = std::string(c.group) + "@" + c.inst;
    o.require(std::abs(via_api - c.expected) <= 0.05, label + " via API = " + fmt(via_api));
    o.require(std::abs(via_cli - c.expected) <= 0.05, label + " via CLI = " + fmt(via_cli));
    o.require(run.out == body.body, label + ": CLI and API bodies differ");
    values += (values.empty() ? "" : "/") + fmt(via_api, 1);
  }
  if (o.pass) o.detail = "CLI = API: " + values;
  return o;
}

Outcome national_gap(const TempDir& dir) {
  Outcome o;
  const auto dataset = testing::load_fixture(dir, "national");
  const auto report = gap_report(dataset, {{}, AwardLevel::Bachelors}, 2021, FieldScope::computing(),
                                 FieldScope::all_degrees());
  auto gap_of = [&](const std::string& gender) {
    for (const auto& row : report.rows)
      if (row.cell == Cell{gender, kHispanic}) return row.gap;
    return std::numeric_limits<double>::quiet_NaN();
  };
  const double men = gap_of("Men"), women = gap_of("Women");
  o.require(std::abs(men - 2.0) <= 0.1, "Hispanic men gap " + fmt(men, 3));
  o.require(std::abs(women + 7.0) <= 0.1, "Hispanic women gap " + fmt(women, 3));
  if (o.pass) o.detail = "Hispanic men " + fmt(men, 1) + ", Hispanic women " + fmt(women, 1);
  return o;
}

Outcome cohort_locality() {
  Outcome o;
  std::mt19937_64 rng(103);
  std::uniform_int_distribution<std::size_t> pick(0, 13);
  std::uniform_int_distribution<std::uint64_t> bump(1, 500);
  for (int trial = 0; trial < 1000; ++trial) {
    auto all = testing::random_counts(rng, 14, 5000);
    const std::size_t target = pick(rng);
    all[target] = std::max<std::uint64_t>(all[target], 7);
    std::vector<std::uint64_t> field(14);
    for (std::size_t i = 0; i < 14; ++i) field[i] = all[i] / 7;
    const auto group = Group::of_cell(kScheme.cell_at(target));
    const double cohort = cohort_share(table_of(field), table_of(all), group);
    const double standard = standard_share(table_of(field), group);

    std::size_t other = pick(rng);
    if (other == target) other = (other + 1) % 14;
    const std::uint64_t delta = bump(rng);
    field[other] += delta;
    all[other] += delta * 3;
    o.require(cohort_share(table_of(field), table_of(all), group) == cohort,
              "cohort share moved in trial " + std::to_string(trial));
    o.require(standard_share(table_of(field), group) != standard,
              "standard share unchanged in trial " + std::to_string(trial));
  }
  if (o.pass) o.detail = "10^3 trials, cohort bit-identical, standard always moved";
  return o;
}

Outcome divergence() {
  Outcome o;
  std::vector<DegreeRecord> records;
  for (int year = 2010; year < 2020; ++year) {
    const std::uint64_t t = static_cast<std::uint64_t>(year - 2010);
    const std::uint64_t a_all = 1000, b_all = 1000 + 200 * t;
    const std::uint64_t a_cs = 100, b_cs = b_all * (10 + t) / 100;
    records.push_back({"X", year, "11.0701", AwardLevel::Bachelors, {"Women", "White"}, a_cs});
    records.push_back({"X", year, "52.0201", AwardLevel::Bachelors, {"Women", "White"}, a_all - a_cs});
    records.push_back({"X", year, "11.0701", AwardLevel::Bachelors, {"Men", "Asian"}, b_cs});
    records.push_back({"X", year, "52.0201", AwardLevel::Bachelors, {"Men", "Asian"}, b_all - b_cs});
  }
  const auto dataset = Dataset::from_records(kScheme, records);
  SeriesRequest req;
  req.group = Group::of_cell({"Women", "White"});
  req.years = {2010, 2019};
  req.metric = Metric::StandardShare;
  const auto standard = series(dataset, req).points;
  req.metric = Metric::CohortShare;
  const auto cohort = series(dataset, req).points;
  req.group = Group::of_cell({"Men", "Asian"});
  const auto other = series(dataset, req).points;
  o.require(standard.size() == 10 && cohort.size() == 10 && other.size() == 10, "missing years");
  if (!o.pass) return o;
  for (std::size_t i = 1; i < 10; ++i) {
    o.require(standard[i].value < standard[i - 1].value, "standard share not decreasing");
    o.require(cohort[i].value == cohort[0].value, "cohort share not flat");
    o.require(other[i].value > other[i - 1].value, "other group's cohort share not growing");
  }
  if (o.pass)
    o.detail = "standard " + fmt(standard.front().value, 1) + " -> " + fmt(standard.back().value, 1) +
               ", cohort flat at " + fmt(cohort.front().value, 1);
  return o;
}

Outcome univ5(const TempDir& dir) {
  Outcome o;
  const auto dataset = testing::load_fixture(dir, "nc12");
  const Selection u5{{"U5"}, AwardLevel::Bachelors};
  const auto all = select_table(dataset, u5, 2020, FieldScope::all_degrees());
  const auto cs = select_table(dataset, u5, 2020, FieldScope::computing());
  const double bw_all = standard_share(all, Group::of_cell({"Women", kBlack}));
  o.require(std::abs(bw_all - 62.0) < 0.05, "Black women share of all degrees " + fmt(bw_all, 2));
  o.require(cs.count(Cell{"Women", kBlack}) == 0, "U5 has CIP-11 degrees to Black women");

  JsDistanceRequest req;
  req.year = 2020;
  req.institutions = {"U1", "U2", "U3", "U4", "U5"};
  const auto report = js_distance_report(dataset, req);
  o.require(report.rows.size() == 5, "expected 5 ranked institutions");
  if (!o.pass) return o;
  const auto& top = report.rows.front();
  o.require(top.institution == "U5", "top is " + top.institution);
  o.require(std::isfinite(top.distance) && top.distance <= kMaxJsDistance, "distance out of range");
  if (o.pass)
    o.detail = "U5 first at " + fmt(top.distance) + " <= " + fmt(kMaxJsDistance) + ", next " +
               report.rows[1].institution + " " + fmt(report.rows[1].distance);
  return o;
}

// Sums the 14 race by gender columns of kept rows straight from the file.
std::map<std::string, std::uint64_t> raw_column_sums(const std::filesystem::path& file) {
  const char* stems[] = {"AIAN", "ASIA", "BKAA", "HISP", "NHPI", "WHIT", "2MOR"};
  std::istringstream in(testing::read_text(file));
  auto split = [](std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> fields;
    std::stringstream s(line);
    for (std::string f; std::getline(s, f, ',');) fields.push_back(f);
    return fields;
  };
  std::string line;
  std::getline(in, line);
  const auto header = split(line);
  auto column = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  };
  std::map<std::string, std::uint64_t> sums;
  while (std::getline(in, line)) {
    const auto row = split(line);
    if (row.size() < header.size()) continue;
    const auto& cip = row[column("CIPCODE")];
    if (cip.find('.') == std::string::npos || cip.starts_with("99")) continue;
    if (row[column("MAJORNUM")] != "1") continue;
    for (const char* stem : stems)
      for (const char* sex : {"M", "W"})
        sums[row[column("UNITID")]] += std::stoull(row[column(std::string("C") + stem + sex)]);
  }
  return sums;
}

Outcome ingest_conservation(const TempDir& dir) {
  Outcome o;
  const auto raw = testing::fixture("ipeds_raw/c2021_a_sample.csv");
  const auto target = dir / "raw";
  IngestOptions options;
  options.year = 2021;
  const auto first = ingest_raw(target, raw, ColumnMap::ipeds_completions(), options);
  const auto dataset = Dataset::open(target);
  const auto expected = raw_column_sums(raw);
  std::uint64_t total = 0;
  for (const auto& [inst, sum] : expected) {
    const auto stored = select_table(dataset, {{inst}, std::nullopt}, 2021, FieldScope::all_degrees()).total();
    o.require(stored == sum, inst + ": stored " + std::to_string(stored) + " vs raw " + std::to_string(sum));
    total += sum;
  }
  o.require(first.total_added == total, "ingest report total differs from raw sums");

  const auto records_before = testing::read_text(target / Dataset::kRecordsFile);
  const auto manifest_before = testing::read_text(target / Dataset::kManifestFile);
  const auto second = ingest_raw(target, raw, ColumnMap::ipeds_completions(), options);
  o.require(second.already_ingested, "second ingest was not a no-op");
  o.require(testing::read_text(target / Dataset::kRecordsFile) == records_before, "records changed");
  o.require(testing::read_text(target / Dataset::kManifestFile) == manifest_before, "manifest changed");
  o.require(Dataset::open(target).digest() == dataset.digest(), "digest changed");
  if (o.pass)
    o.detail = std::to_string(expected.size()) + " institutions, " + std::to_string(total) +
               " graduates conserved; re-ingest byte-identical";
  return o;
}

}  // namespace

int main() {
  TempDir dir;
  int failures = 0;
  std::map<std::string, bool> results;
  auto report = [&](const std::string& name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    results[name] = o.pass;
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  (" << o.detail << ")" << std::endl;
  };

  report("equitability extremes", equitability_extremes);
  report("entropy oracle equivalence", entropy_oracle);
  report("JS metric properties", js_properties);
  report("two-institution cohort shares via CLI and API", [&] { return two_institution_cohorts(dir); });
  report("national 2021 opportunity gap", [&] { return national_gap(dir); });
  report("cohort locality", cohort_locality);
  report("standard vs cohort divergence", divergence);
  report("Univ-5 JS distance pattern", [&] { return univ5(dir); });
  report("ingest conservation and idempotence", [&] { return ingest_conservation(dir); });
  report("national curves substitute", [&] {
    Outcome o;
    for (const char* dep : {"equitability extremes", "entropy oracle equivalence", "JS metric properties",
                            "cohort locality", "ingest conservation and idempotence"})
      o.require(results[dep], std::string("depends on failing check: ") + dep);
    if (o.pass) o.detail = "property and oracle checks plus the single-year raw sample pipeline pass";
    return o;
  });

  std::cout << (failures ? std::to_string(failures) + " criteria failed" : "all criteria passed") << std::endl;
  return failures ? 1 : 0;
}
