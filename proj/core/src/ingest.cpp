#include "gradlens/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>

#include "csv.hpp"
#include "digest.hpp"
#include "gradlens/error.hpp"
#include "store.hpp"

namespace gradlens {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<long long> parse_integer(std::string_view text) {
  text = trim(text);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

// Existing store contents, or a fresh one for a new directory.
struct Store {
  DatasetManifest manifest;
  std::vector<DegreeRecord> records;
  bool exists = false;
};

Store load_store(const std::filesystem::path& dir, const IngestOptions& options) {
  Store store;
  if (std::filesystem::exists(dir / Dataset::kManifestFile)) {
    auto dataset = Dataset::open(dir);
    store.manifest = dataset.manifest();
    store.records.assign(dataset.records().begin(), dataset.records().end());
    store.exists = true;
    if (store.manifest.policy != options.policy)
      throw Error(ErrorKind::SchemeMismatch,
                  "ingest options differ from the policy this dataset was created with",
                  dir.string());
    return store;
  }
  store.manifest.policy = options.policy;
  store.manifest.scheme = CategoryScheme::ipeds_default(options.policy.extras);
  store.manifest.name = options.name.value_or(dir.filename().string());
  return store;
}

std::uint64_t sum_counts(const std::vector<DegreeRecord>& records) {
  std::uint64_t total = 0;
  for (const auto& r : records) total += r.count;
  return total;
}

void commit(const std::filesystem::path& dir, Store& store, std::vector<DegreeRecord> incoming,
            SourceDigest source, IngestReport& report) {
  const auto& scheme = store.manifest.scheme;
  std::size_t in_file = detail::merge_records(incoming, scheme);
  if (in_file > 0)
    report.warnings.push_back(std::to_string(in_file) + " duplicate keys in " + source.file +
                              " were summed");
  report.records_added = incoming.size();
  report.total_added = sum_counts(incoming);
  source.records = incoming.size();
  source.total = report.total_added;

  auto merged = std::move(store.records);
  merged.insert(merged.end(), std::make_move_iterator(incoming.begin()),
                std::make_move_iterator(incoming.end()));
  std::size_t overlaps = detail::merge_records(merged, scheme);
  if (overlaps > 0)
    report.warnings.push_back(std::to_string(overlaps) +
                              " keys overlapped records already in the dataset and were summed");

  store.manifest.sources.push_back(std::move(source));
  auto csv = to_canonical_csv(merged);
  detail::refresh_manifest(store.manifest, merged, csv);
  detail::write_store(dir, store.manifest, csv);
  report.manifest = store.manifest;
}

bool already_ingested(const Store& store, const std::string& sha) {
  return std::any_of(store.manifest.sources.begin(), store.manifest.sources.end(),
                     [&](const SourceDigest& s) { return s.sha256 == sha; });
}

}  // namespace

ColumnMap ColumnMap::parse(std::string_view text) {
  ColumnMap map;
  auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string where = "line " + std::to_string(i + 1);
    auto line = lines[i];
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::InvalidColumnMap, "expected 'key = value'", where);
    auto key = trim(line.substr(0, eq));
    auto value = std::string(trim(line.substr(eq + 1)));
    if (value.empty()) throw Error(ErrorKind::InvalidColumnMap, "empty column name", where);
    if (key == "institution") {
      map.institution_column = value;
    } else if (key == "cip") {
      map.cip_column = value;
    } else if (key == "award_level") {
      map.award_level_column = value;
    } else if (key == "major_number") {
      map.major_number_column = value;
    } else if (key == "year") {
      map.year_column = value;
    } else if (key.starts_with("cell ")) {
      auto spec = trim(key.substr(5));
      auto comma = spec.find(',');
      if (comma == std::string_view::npos)
        throw Error(ErrorKind::InvalidColumnMap, "cell key must be 'cell <Race>,<Gender>'", where);
      map.cells.emplace_back(Cell{std::string(trim(spec.substr(comma + 1))),
                                  std::string(trim(spec.substr(0, comma)))},
                             value);
    } else {
      throw Error(ErrorKind::InvalidColumnMap, "unknown key '" + std::string(key) + "'", where);
    }
  }
  if (map.institution_column.empty() || map.cip_column.empty() || map.award_level_column.empty())
    throw Error(ErrorKind::InvalidColumnMap, "institution, cip and award_level are required");
  if (map.cells.empty()) throw Error(ErrorKind::InvalidColumnMap, "no cell columns mapped");
  return map;
}

ColumnMap ColumnMap::load(const std::filesystem::path& path) {
  return parse(detail::read_file(path.string()));
}

ColumnMap ColumnMap::ipeds_completions() {
  ColumnMap map;
  map.institution_column = "UNITID";
  map.cip_column = "CIPCODE";
  map.award_level_column = "AWLEVEL";
  map.major_number_column = "MAJORNUM";
  const std::pair<std::string, std::string> races[] = {
      {"American Indian or Alaska Native", "CAIAN"},
      {"Asian", "CASIA"},
      {"Black or African American", "CBKAA"},
      {"Hispanic or Latino", "CHISP"},
      {"Native Hawaiian or Other Pacific Islander", "CNHPI"},
      {"White", "CWHIT"},
      {"Two or more races", "C2MOR"},
      {std::string(kNonresidentLabel), "CNRAL"},
      {std::string(kRaceUnknownLabel), "CUNKN"},
  };
  for (const auto& [race, stem] : races) {
    map.cells.emplace_back(Cell{"Men", race}, stem + "M");
    map.cells.emplace_back(Cell{"Women", race}, stem + "W");
  }
  return map;
}

std::string ColumnMap::serialize() const {
  std::string out = "institution = " + institution_column + "\ncip = " + cip_column +
                    "\naward_level = " + award_level_column + "\n";
  if (major_number_column) out += "major_number = " + *major_number_column + "\n";
  if (year_column) out += "year = " + *year_column + "\n";
  for (const auto& [cell, column] : cells) out += "cell " + cell_label(cell) + " = " + column + "\n";
  return out;
}

void ColumnMap::validate_against(const CategoryScheme& scheme) const {
  std::vector<int> mapped(scheme.cell_count(), 0);
  for (const auto& [cell, column] : cells) {
    auto gender = scheme.resolve_gender(cell.gender);
    auto race = scheme.resolve_race(cell.race);
    if (gender && race) {
      ++mapped[*scheme.cell_index(Cell{*gender, *race})];
    } else if (!(gender && is_extra_race_label(cell.race))) {
      throw Error(ErrorKind::InvalidColumnMap, "cell not in scheme", cell_label(cell));
    }
  }
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    if (mapped[i] == 0)
      throw Error(ErrorKind::InvalidColumnMap, "scheme cell has no column",
                  cell_label(scheme.cell_at(i)));
    if (mapped[i] > 1)
      throw Error(ErrorKind::InvalidColumnMap, "scheme cell mapped more than once",
                  cell_label(scheme.cell_at(i)));
  }
}

IngestReport ingest_raw(const std::filesystem::path& dataset_dir,
                        const std::filesystem::path& source, const ColumnMap& columns,
                        const IngestOptions& options) {
  IngestReport report;
  const std::string bytes = detail::read_file(source.string());
  const std::string sha = detail::sha256_hex(bytes);
  Store store = load_store(dataset_dir, options);
  if (already_ingested(store, sha)) {
    report.already_ingested = true;
    report.manifest = store.manifest;
    return report;
  }
  const auto& scheme = store.manifest.scheme;
  columns.validate_against(scheme);

  const std::string src = source.filename().string();
  auto where = [&](std::size_t line) { return src + ": line " + std::to_string(line); };
  auto lines = detail::split_lines(bytes);
  if (lines.empty()) throw Error(ErrorKind::MissingColumn, "file has no header row", where(1));

  std::string_view header_line = lines.front();
  if (header_line.starts_with("\xEF\xBB\xBF")) header_line.remove_prefix(3);
  std::vector<std::string> header;
  detail::split_csv_line(header_line, header);
  for (auto& h : header) h = std::string(trim(h));
  std::map<std::string, std::size_t, std::less<>> position;
  for (std::size_t i = 0; i < header.size(); ++i) position.emplace(header[i], i);

  std::set<std::size_t> referenced;
  auto locate = [&](const std::string& name) {
    auto it = position.find(name);
    if (it == position.end()) throw Error(ErrorKind::MissingColumn, "missing column " + name, src);
    referenced.insert(it->second);
    return it->second;
  };
  const std::size_t inst_col = locate(columns.institution_column);
  const std::size_t cip_col = locate(columns.cip_column);
  const std::size_t award_col = locate(columns.award_level_column);
  std::optional<std::size_t> major_col, year_col;
  if (columns.major_number_column) major_col = locate(*columns.major_number_column);
  if (columns.year_column) year_col = locate(*columns.year_column);
  if (!year_col && !options.year)
    throw Error(ErrorKind::MissingColumn, "no year column mapped and no year given", src);

  struct CellColumn {
    Cell cell;
    std::size_t position;
  };
  std::vector<CellColumn> cell_columns;
  for (const auto& [cell, column] : columns.cells) {
    auto gender = scheme.resolve_gender(cell.gender);
    auto race = scheme.resolve_race(cell.race);
    if (gender && race) {
      cell_columns.push_back({Cell{*gender, *race}, locate(column)});
    } else if (auto it = position.find(column); it != position.end()) {
      referenced.insert(it->second);
      report.excluded_columns.push_back(column);
    }
  }
  for (std::size_t i = 0; i < header.size(); ++i)
    if (!referenced.contains(i)) report.unmapped_columns.push_back(header[i]);

  std::vector<DegreeRecord> incoming;
  std::vector<std::string> f;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (trim(lines[i]).empty()) continue;
    ++report.rows_read;
    if (!detail::split_csv_line(lines[i], f) || f.size() != header.size())
      throw Error(ErrorKind::MalformedRow,
                  "expected " + std::to_string(header.size()) + " fields, found " +
                      std::to_string(f.size()),
                  where(line_no));
    const std::string cip = CipFilter::normalize_code(f[cip_col]);
    // CIP 99 is the all-programs total and two-digit codes are family
    // summaries; both would double-count the detail rows.
    if (cip == "99" || cip.find('.') == std::string::npos) {
      ++report.rows_skipped;
      continue;
    }
    if (major_col) {
      auto major = parse_integer(f[*major_col]);
      if (!major) throw Error(ErrorKind::MalformedRow, "bad major number", where(line_no));
      if (*major != 1 && !store.manifest.policy.include_second_majors) {
        ++report.rows_skipped;
        continue;
      }
    }
    AwardLevel award;
    if (auto code = parse_integer(f[award_col])) {
      award = award_level_from_ipeds(static_cast<int>(*code));
    } else if (auto named = parse_award_level(trim(f[award_col]))) {
      award = *named;
    } else {
      throw Error(ErrorKind::MalformedRow, "bad award level '" + f[award_col] + "'",
                  where(line_no));
    }
    int year = 0;
    if (year_col) {
      auto y = parse_integer(f[*year_col]);
      if (!y) throw Error(ErrorKind::MalformedRow, "bad year", where(line_no));
      year = static_cast<int>(*y);
    } else {
      year = *options.year;
    }
    std::string institution(trim(f[inst_col]));
    if (institution.empty()) throw Error(ErrorKind::MalformedRow, "empty institution", where(line_no));

    for (const auto& cc : cell_columns) {
      auto value = parse_integer(f[cc.position]);
      if (!value)
        throw Error(ErrorKind::MalformedRow,
                    "non-integer count in " + header[cc.position] + ": '" + f[cc.position] + "'",
                    where(line_no));
      if (*value < 0)
        throw Error(ErrorKind::NegativeCount, "negative count in " + header[cc.position],
                    where(line_no));
      if (*value == 0) continue;
      incoming.push_back(DegreeRecord{institution, year, cip, award, cc.cell,
                                      static_cast<std::uint64_t>(*value)});
    }
  }

  commit(dataset_dir, store, std::move(incoming),
         SourceDigest{src, sha, "raw", report.rows_read, 0, 0}, report);
  return report;
}

IngestReport ingest_canonical(const std::filesystem::path& dataset_dir,
                              const std::filesystem::path& source, const IngestOptions& options) {
  IngestReport report;
  const std::string bytes = detail::read_file(source.string());
  const std::string sha = detail::sha256_hex(bytes);
  Store store = load_store(dataset_dir, options);
  if (already_ingested(store, sha)) {
    report.already_ingested = true;
    report.manifest = store.manifest;
    return report;
  }
  const std::string src = source.filename().string();
  auto parsed = detail::parse_canonical(bytes, store.manifest.scheme, src);
  report.rows_read = parsed.rows;
  report.rows_skipped = parsed.skipped_extras;
  if (parsed.skipped_extras > 0)
    report.warnings.push_back(std::to_string(parsed.skipped_extras) +
                              " rows in categories excluded by the scheme were skipped");
  commit(dataset_dir, store, std::move(parsed.records),
         SourceDigest{src, sha, "canonical", parsed.rows, 0, 0}, report);
  return report;
}

void import_institution_names(const std::filesystem::path& dataset_dir,
                              const std::filesystem::path& source) {
  auto text = detail::read_file(source.string());
  auto lines = detail::split_lines(text);
  std::vector<std::string> f;
  if (lines.empty() || !detail::split_csv_line(lines.front(), f) || f.size() < 2)
    throw Error(ErrorKind::MissingColumn, "names file needs an 'institution_id,name' header",
                source.string());
  for (std::size_t i = 1; i < lines.size(); ++i)
    if (!lines[i].empty() && (!detail::split_csv_line(lines[i], f) || f.size() < 2))
      throw Error(ErrorKind::MalformedRow, "expected institution_id,name",
                  source.string() + ": line " + std::to_string(i + 1));
  std::filesystem::create_directories(dataset_dir);
  std::filesystem::copy_file(source, dataset_dir / Dataset::kNamesFile,
                             std::filesystem::copy_options::overwrite_existing);
}

}  // namespace gradlens
