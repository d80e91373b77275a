#include <doctest.h>

#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "gradlens/dataset.hpp"
#include "gradlens/error.hpp"
#include "gradlens/ingest.hpp"
#include "support.hpp"

using namespace gradlens;
using gradlens::testing::TempDir;
using gradlens::testing::fixture;
using gradlens::testing::read_text;
using gradlens::testing::write_text;

namespace {

const std::string kHeader = std::string(kCanonicalHeader) + "\n";

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::Io;
}

std::string error_context(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.context();
  }
  return {};
}

// Minimal raw layout: one race's columns mapped, others present as zeros.
std::string raw_header() {
  std::string h = "UNITID,CIPCODE,MAJORNUM,AWLEVEL";
  for (const char* stem : {"CAIAN", "CASIA", "CBKAA", "CHISP", "CNHPI", "CWHIT", "C2MOR", "CNRAL", "CUNKN"})
    h += std::string(",") + stem + "M," + stem + "W";
  return h + "\n";
}

std::string raw_row(const std::string& unitid, const std::string& cip, int major, int award,
                    std::map<std::string, int> values) {
  std::string row = unitid + "," + cip + "," + std::to_string(major) + "," + std::to_string(award);
  for (const char* stem : {"CAIAN", "CASIA", "CBKAA", "CHISP", "CNHPI", "CWHIT", "C2MOR", "CNRAL", "CUNKN"})
    for (const char* g : {"M", "W"}) row += "," + std::to_string(values[std::string(stem) + g]);
  return row + "\n";
}

std::map<std::string, std::uint64_t> totals_by_institution(const Dataset& d) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& r : d.records()) out[r.institution_id] += r.count;
  return out;
}

}  // namespace

TEST_CASE("column map template round-trips through its text form") {
  auto map = ColumnMap::ipeds_completions();
  auto parsed = ColumnMap::parse(map.serialize());
  CHECK(parsed.serialize() == map.serialize());
  CHECK_NOTHROW(map.validate_against(CategoryScheme::ipeds_default()));
  CHECK_NOTHROW(map.validate_against(CategoryScheme::ipeds_default({true, true})));
  auto shipped = ColumnMap::load(GRADLENS_FIXTURE_DIR "/../../tools/templates/ipeds_completions.colmap");
  CHECK(shipped.serialize() == map.serialize());
}

TEST_CASE("column map validation") {
  auto map = ColumnMap::ipeds_completions();
  map.cells.pop_back();  // Race/ethnicity unknown, Women: an extra, still fine
  CHECK_NOTHROW(map.validate_against(CategoryScheme::ipeds_default()));
  CHECK(kind_of([&] { map.validate_against(CategoryScheme::ipeds_default({false, true})); }) ==
        ErrorKind::InvalidColumnMap);

  auto twice = ColumnMap::ipeds_completions();
  twice.cells.push_back(twice.cells.front());
  CHECK(kind_of([&] { twice.validate_against(CategoryScheme::ipeds_default()); }) ==
        ErrorKind::InvalidColumnMap);

  auto alien = ColumnMap::ipeds_completions();
  alien.cells.emplace_back(Cell{"Men", "Martian"}, "CMARM");
  CHECK(kind_of([&] { alien.validate_against(CategoryScheme::ipeds_default()); }) ==
        ErrorKind::InvalidColumnMap);

  CHECK(kind_of([] { ColumnMap::parse("institution UNITID"); }) == ErrorKind::InvalidColumnMap);
  CHECK(kind_of([] { ColumnMap::parse("colour = red"); }) == ErrorKind::InvalidColumnMap);
}

TEST_CASE("raw ingest: empty file with a valid header") {
  TempDir dir;
  write_text(dir / "empty.csv", raw_header());
  IngestOptions opts;
  opts.year = 2021;
  auto report = ingest_raw(dir / "ds", dir / "empty.csv", ColumnMap::ipeds_completions(), opts);
  CHECK(report.manifest.records == 0);
  CHECK(report.manifest.total == 0);
  auto d = Dataset::open(dir / "ds");
  CHECK(d.records().empty());
  CHECK_FALSE(d.manifest().years.has_value());
}

TEST_CASE("raw ingest: one CS row becomes two records") {
  TempDir dir;
  write_text(dir / "one.csv", raw_header() + raw_row("100", "11.0701", 1, 5, {{"CWHITM", 3}, {"CWHITW", 2}}));
  IngestOptions opts;
  opts.year = 2021;
  auto report = ingest_raw(dir / "ds", dir / "one.csv", ColumnMap::ipeds_completions(), opts);
  CHECK(report.records_added == 2);
  CHECK(report.total_added == 5);
  auto d = Dataset::open(dir / "ds");
  REQUIRE(d.records().size() == 2);
  for (const auto& r : d.records()) {
    CHECK(r.is_computing());
    CHECK(r.year == 2021);
    CHECK(r.award_level == AwardLevel::Bachelors);
  }
  CHECK(report.excluded_columns.size() == 4);  // CNRALM/W, CUNKNM/W
}

TEST_CASE("raw ingest skips totals, family summaries and second majors") {
  TempDir dir;
  std::string text = raw_header();
  text += raw_row("100", "99", 1, 5, {{"CWHITM", 50}});
  text += raw_row("100", "11", 1, 5, {{"CWHITM", 40}});
  text += raw_row("100", "11.0701", 2, 5, {{"CWHITM", 30}});
  text += raw_row("100", "11.0701", 1, 5, {{"CWHITM", 7}});
  write_text(dir / "r.csv", text);
  IngestOptions opts;
  opts.year = 2021;
  auto report = ingest_raw(dir / "ds", dir / "r.csv", ColumnMap::ipeds_completions(), opts);
  CHECK(report.rows_read == 4);
  CHECK(report.rows_skipped == 3);
  CHECK(report.manifest.total == 7);

  opts.policy.include_second_majors = true;
  auto second = ingest_raw(dir / "ds2", dir / "r.csv", ColumnMap::ipeds_completions(), opts);
  CHECK(second.manifest.total == 37);
}

TEST_CASE("raw ingest errors carry line numbers and leave no partial state") {
  TempDir dir;
  IngestOptions opts;
  opts.year = 2021;
  write_text(dir / "neg.csv", raw_header() + raw_row("100", "11.0701", 1, 5, {{"CWHITM", 3}}) +
                                  raw_row("100", "11.0101", 1, 5, {{"CWHITW", -2}}));
  CHECK(kind_of([&] { ingest_raw(dir / "ds", dir / "neg.csv", ColumnMap::ipeds_completions(), opts); }) ==
        ErrorKind::NegativeCount);
  CHECK(error_context([&] {
          ingest_raw(dir / "ds", dir / "neg.csv", ColumnMap::ipeds_completions(), opts);
        }) == "neg.csv: line 3");
  CHECK_FALSE(std::filesystem::exists(dir / "ds" / Dataset::kManifestFile));

  write_text(dir / "short.csv", raw_header() + "100,11.0701,1\n");
  CHECK(kind_of([&] { ingest_raw(dir / "ds", dir / "short.csv", ColumnMap::ipeds_completions(), opts); }) ==
        ErrorKind::MalformedRow);

  write_text(dir / "nocol.csv", "UNITID,CIPCODE,AWLEVEL\n");
  CHECK(kind_of([&] { ingest_raw(dir / "ds", dir / "nocol.csv", ColumnMap::ipeds_completions(), opts); }) ==
        ErrorKind::MissingColumn);

  write_text(dir / "ok.csv", raw_header());
  CHECK(kind_of([&] { ingest_raw(dir / "ds", dir / "ok.csv", ColumnMap::ipeds_completions(), {}); }) ==
        ErrorKind::MissingColumn);
}

TEST_CASE("raw sample: conservation against the independent column-sum oracle") {
  TempDir dir;
  IngestOptions opts;
  opts.year = 2021;
  auto report = ingest_raw(dir / "ds", fixture("ipeds_raw/c2021_a_sample.csv"),
                           ColumnMap::ipeds_completions(), opts);
  auto expected = nlohmann::json::parse(read_text(fixture("ipeds_raw/expected.json")));
  CHECK(report.rows_read == expected["rows"].get<std::size_t>());
  CHECK(report.rows_skipped == expected["rows_skipped"].get<std::size_t>());
  auto d = Dataset::open(dir / "ds");
  CHECK(d.manifest().total == expected["total"].get<std::uint64_t>());
  auto by_inst = totals_by_institution(d);
  for (auto& [inst, total] : expected["by_institution"].items())
    CHECK(by_inst[inst] == total.get<std::uint64_t>());

  RecordFilter cs;
  cs.scope = FieldScope::computing();
  CHECK(d.table(cs).total() == expected["computing_bachelors"].get<std::uint64_t>());

  // Unmapped columns are reported, not dropped silently.
  auto has = [&](const std::string& c) {
    return std::find(report.unmapped_columns.begin(), report.unmapped_columns.end(), c) !=
           report.unmapped_columns.end();
  };
  CHECK(has("CTOTALT"));
  CHECK(has("XCWHITM"));
  CHECK_FALSE(has("CWHITM"));
}

TEST_CASE("ingesting the same file twice changes nothing") {
  TempDir dir;
  IngestOptions opts;
  opts.year = 2021;
  auto source = fixture("ipeds_raw/c2021_a_sample.csv");
  ingest_raw(dir / "ds", source, ColumnMap::ipeds_completions(), opts);
  auto records_before = read_text(dir / "ds" / Dataset::kRecordsFile);
  auto manifest_before = read_text(dir / "ds" / Dataset::kManifestFile);
  auto again = ingest_raw(dir / "ds", source, ColumnMap::ipeds_completions(), opts);
  CHECK(again.already_ingested);
  CHECK(read_text(dir / "ds" / Dataset::kRecordsFile) == records_before);
  CHECK(read_text(dir / "ds" / Dataset::kManifestFile) == manifest_before);
}

TEST_CASE("policy must match the existing dataset") {
  TempDir dir;
  IngestOptions opts;
  opts.year = 2021;
  ingest_raw(dir / "ds", fixture("ipeds_raw/c2021_a_sample.csv"), ColumnMap::ipeds_completions(), opts);
  write_text(dir / "more.csv", raw_header());
  opts.policy.extras.nonresident = true;
  CHECK(kind_of([&] { ingest_raw(dir / "ds", dir / "more.csv", ColumnMap::ipeds_completions(), opts); }) ==
        ErrorKind::SchemeMismatch);
}

TEST_CASE("extras are kept when the scheme includes them") {
  TempDir dir;
  IngestOptions opts;
  opts.year = 2021;
  opts.policy.extras = {true, true};
  auto report = ingest_raw(dir / "ds", fixture("ipeds_raw/c2021_a_sample.csv"),
                           ColumnMap::ipeds_completions(), opts);
  CHECK(report.excluded_columns.empty());
  auto d = Dataset::open(dir / "ds");
  CHECK(d.scheme().size(Axis::Race) == 9);
  auto expected = nlohmann::json::parse(read_text(fixture("ipeds_raw/expected.json")));
  CHECK(d.manifest().total > expected["total"].get<std::uint64_t>());
}

TEST_CASE("canonical ingest: duplicate keys are summed with a warning") {
  TempDir dir;
  write_text(dir / "dup.csv", kHeader + "A,2020,11.0701,bachelors,Men,White,2\n"
                                        "A,2020,11.0701,bachelors,Men,White,3\n");
  auto report = ingest_canonical(dir / "ds", dir / "dup.csv");
  CHECK(report.warnings.size() == 1);
  auto d = Dataset::open(dir / "ds");
  REQUIRE(d.records().size() == 1);
  CHECK(d.records()[0].count == 5);
}

TEST_CASE("canonical ingest errors") {
  TempDir dir;
  write_text(dir / "bad_header.csv", "inst,year\n");
  CHECK(kind_of([&] { ingest_canonical(dir / "ds", dir / "bad_header.csv"); }) == ErrorKind::MissingColumn);
  write_text(dir / "label.csv", kHeader + "A,2020,11.0701,bachelors,Men,Martian,2\n");
  CHECK(kind_of([&] { ingest_canonical(dir / "ds", dir / "label.csv"); }) == ErrorKind::SchemeMismatch);
  write_text(dir / "fields.csv", kHeader + "A,2020,11.0701,bachelors,Men\n");
  CHECK(kind_of([&] { ingest_canonical(dir / "ds", dir / "fields.csv"); }) == ErrorKind::MalformedRow);
  CHECK(error_context([&] { ingest_canonical(dir / "ds", dir / "fields.csv"); }) == "fields.csv: line 2");
  write_text(dir / "neg.csv", kHeader + "A,2020,11.0701,bachelors,Men,White,-1\n");
  CHECK(kind_of([&] { ingest_canonical(dir / "ds", dir / "neg.csv"); }) == ErrorKind::NegativeCount);
  CHECK_FALSE(std::filesystem::exists(dir / "ds"));
}

TEST_CASE("canonical ingest skips excluded extras with a warning") {
  TempDir dir;
  write_text(dir / "x.csv", kHeader + "A,2020,11.0701,bachelors,Men,White,2\n"
                                      "A,2020,11.0701,bachelors,Men,U.S. Nonresident,9\n");
  auto report = ingest_canonical(dir / "ds", dir / "x.csv");
  CHECK(report.rows_skipped == 1);
  CHECK(report.warnings.size() == 1);
  CHECK(report.manifest.total == 2);
}

TEST_CASE("export then re-ingest reproduces the dataset") {
  TempDir dir;
  auto d = testing::load_fixture(dir, "table12");
  write_text(dir / "export.csv", to_canonical_csv(d.records()));
  ingest_canonical(dir / "copy", dir / "export.csv");
  auto copy = Dataset::open(dir / "copy");
  CHECK(copy.manifest().records == d.manifest().records);
  CHECK(copy.manifest().total == d.manifest().total);
  CHECK(copy.manifest().records_sha256 == d.manifest().records_sha256);
  CHECK(std::equal(copy.records().begin(), copy.records().end(), d.records().begin(), d.records().end()));
}

TEST_CASE("two-institution fixture: INST1 has 112 CS degrees") {
  TempDir dir;
  auto d = testing::load_fixture(dir, "table12");
  RecordFilter f;
  f.institutions = {"INST1"};
  f.scope = FieldScope::computing();
  CHECK(d.table(f).total() == 112);
  f.institutions = {"INST2"};
  CHECK(d.table(f).total() == 580);
  CHECK(d.institution_name("INST1") == "Institution 1 (HSI)");
}

TEST_CASE("query semantics") {
  TempDir dir;
  auto d = testing::load_fixture(dir, "hsi2021");

  RecordFilter none;
  none.years = YearRange{1990, 1991};
  CHECK(d.query(none).records.empty());

  RecordFilter cs;
  cs.scope = FieldScope::computing();
  for (const auto& r : d.query(cs).records) CHECK(r.cip.starts_with("11"));

  RecordFilter everything;
  everything.award_level.reset();
  CHECK(d.query(everything).records.size() == d.records().size());

  // Disjoint filters partition the records.
  RecordFilter bach, not_bach_masters;
  bach.award_level = AwardLevel::Bachelors;
  not_bach_masters.award_level = AwardLevel::Masters;
  CHECK(d.query(bach).records.size() + d.query(not_bach_masters).records.size() == d.records().size());

  RecordFilter unknown;
  unknown.institutions = {"NOPE"};
  auto q = d.query(unknown);
  CHECK(q.records.empty());
  REQUIRE(q.warnings.size() == 1);
  CHECK(q.warnings[0].find("unknown_institution") != std::string::npos);
}

TEST_CASE("HSI fixture: 2300+ Hispanic women overall, 5 in computing") {
  TempDir dir;
  auto d = testing::load_fixture(dir, "hsi2021");
  const Cell hw{"Women", "Hispanic or Latino"};
  RecordFilter all;
  CHECK(d.table(all).count(hw) >= 2300);
  RecordFilter cs;
  cs.scope = FieldScope::computing();
  CHECK(d.table(cs).count(hw) == 5);
}

TEST_CASE("manifest describes the dataset and detects tampering") {
  TempDir dir;
  auto d = testing::load_fixture(dir, "nc12");
  const auto& m = d.manifest();
  CHECK(m.institutions == 12);
  CHECK(m.years == YearRange{2010, 2020});
  CHECK(m.sources.size() == 1);
  CHECK(m.sources[0].kind == "canonical");
  CHECK(m.sources[0].sha256.size() == 64);
  CHECK(DatasetManifest::from_json(m.to_json()) == m);
  CHECK(d.institution_years("U5") == YearRange{2020, 2020});
  CHECK(d.institution_years("U11") == YearRange{2010, 2020});

  auto records = dir / "nc12" / Dataset::kRecordsFile;
  auto text = read_text(records);
  text.back() = '\n';
  text += "U1,2020,11.0701,bachelors,Men,White,1\n";
  write_text(records, text);
  CHECK(kind_of([&] { Dataset::open(dir / "nc12"); }) == ErrorKind::ManifestCorrupt);

  write_text(dir / "nc12" / Dataset::kManifestFile, "{not json");
  CHECK(kind_of([&] { Dataset::open(dir / "nc12"); }) == ErrorKind::ManifestCorrupt);
}

TEST_CASE("open on a missing directory is an Io error") {
  TempDir dir;
  CHECK(kind_of([&] { Dataset::open(dir / "absent"); }) == ErrorKind::Io);
}
