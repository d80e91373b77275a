#include "gradlens/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "digest.hpp"
#include "gradlens/error.hpp"
#include "store.hpp"

namespace gradlens {
namespace {

using nlohmann::json;

template <typename T>
std::optional<T> parse_number(std::string_view text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

auto record_key(const DegreeRecord& r, const CategoryScheme& scheme) {
  return std::make_tuple(std::string_view(r.institution_id), r.year, std::string_view(r.cip),
                         static_cast<int>(r.award_level), scheme.cell_index(r.cell).value_or(0));
}

}  // namespace

namespace detail {

CanonicalParse parse_canonical(std::string_view text, const CategoryScheme& scheme,
                               std::string_view source) {
  CanonicalParse out;
  auto lines = split_lines(text);
  auto where = [&](std::size_t line) {
    return std::string(source) + ": line " + std::to_string(line);
  };
  if (lines.empty() || lines.front() != kCanonicalHeader)
    throw Error(ErrorKind::MissingColumn,
                "canonical header must be exactly '" + std::string(kCanonicalHeader) + "'", where(1));
  std::vector<std::string> f;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (lines[i].empty()) continue;
    ++out.rows;
    if (!split_csv_line(lines[i], f) || f.size() != 7)
      throw Error(ErrorKind::MalformedRow, "expected 7 fields", where(line_no));
    if (f[0].empty()) throw Error(ErrorKind::MalformedRow, "empty institution_id", where(line_no));
    auto year = parse_number<int>(f[1]);
    if (!year) throw Error(ErrorKind::MalformedRow, "bad year '" + f[1] + "'", where(line_no));
    auto award = parse_award_level(f[3]);
    if (!award)
      throw Error(ErrorKind::MalformedRow, "bad award_level '" + f[3] + "'", where(line_no));
    if (!f[6].empty() && f[6].front() == '-')
      throw Error(ErrorKind::NegativeCount, "negative count", where(line_no));
    auto count = parse_number<std::uint64_t>(f[6]);
    if (!count) throw Error(ErrorKind::MalformedRow, "bad count '" + f[6] + "'", where(line_no));
    auto gender = scheme.resolve_gender(f[4]);
    auto race = scheme.resolve_race(f[5]);
    if (!race && is_extra_race_label(f[5]) && gender) {
      ++out.skipped_extras;
      continue;
    }
    if (!gender || !race)
      throw Error(ErrorKind::SchemeMismatch,
                  "label outside the active scheme: " + (gender ? f[5] : f[4]), where(line_no));
    out.records.push_back(DegreeRecord{f[0], *year, CipFilter::normalize_code(f[2]), *award,
                                       Cell{*gender, *race}, *count});
  }
  return out;
}

std::size_t merge_records(std::vector<DegreeRecord>& records, const CategoryScheme& scheme) {
  std::stable_sort(records.begin(), records.end(), [&](const auto& a, const auto& b) {
    return record_key(a, scheme) < record_key(b, scheme);
  });
  std::size_t merged = 0;
  std::vector<DegreeRecord> out;
  out.reserve(records.size());
  for (auto& r : records) {
    if (!out.empty() && record_key(out.back(), scheme) == record_key(r, scheme)) {
      out.back().count += r.count;
      ++merged;
    } else {
      out.push_back(std::move(r));
    }
  }
  records = std::move(out);
  return merged;
}

void refresh_manifest(DatasetManifest& manifest, const std::vector<DegreeRecord>& records,
                      const std::string& records_csv) {
  std::set<std::string_view> institutions;
  manifest.years.reset();
  manifest.total = 0;
  for (const auto& r : records) {
    institutions.insert(r.institution_id);
    manifest.total += r.count;
    if (!manifest.years) manifest.years = YearRange{r.year, r.year};
    manifest.years->first = std::min(manifest.years->first, r.year);
    manifest.years->last = std::max(manifest.years->last, r.year);
  }
  manifest.institutions = institutions.size();
  manifest.records = records.size();
  manifest.records_sha256 = sha256_hex(records_csv);
}

void write_store(const std::filesystem::path& dir, const DatasetManifest& manifest,
                 const std::string& records_csv) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& content) {
    auto tmp = dir / (std::string(name) + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << content;
      if (!out) throw Error(ErrorKind::Io, "cannot write dataset file", tmp.string());
    }
    return tmp;
  };
  auto records_tmp = write(Dataset::kRecordsFile, records_csv);
  auto manifest_tmp = write(Dataset::kManifestFile, manifest.to_json());
  std::filesystem::rename(records_tmp, dir / Dataset::kRecordsFile);
  std::filesystem::rename(manifest_tmp, dir / Dataset::kManifestFile);
}

}  // namespace detail

std::string DatasetManifest::to_json() const {
  json sources_json = json::array();
  for (const auto& s : sources)
    sources_json.push_back({{"file", s.file},
                            {"sha256", s.sha256},
                            {"kind", s.kind},
                            {"rows", s.rows},
                            {"records", s.records},
                            {"total", s.total}});
  json j = {
      {"format", "gradlens-dataset/1"},
      {"name", name},
      {"years", years ? json{{"first", years->first}, {"last", years->last}} : json(nullptr)},
      {"institutions", institutions},
      {"records", records},
      {"total", total},
      {"scheme",
       {{"genders", scheme.genders()},
        {"races", scheme.races()},
        {"extras", {{"nonresident", scheme.extras().nonresident},
                    {"unknown", scheme.extras().unknown}}}}},
      {"policy",
       {{"include_second_majors", policy.include_second_majors},
        {"award_levels", "all"},
        {"extras", {{"nonresident", policy.extras.nonresident},
                    {"unknown", policy.extras.unknown}}}}},
      {"sources", sources_json},
      {"records_sha256", records_sha256},
  };
  return j.dump(2) + "\n";
}

DatasetManifest DatasetManifest::from_json(std::string_view text) {
  try {
    auto j = json::parse(text);
    if (j.at("format") != "gradlens-dataset/1")
      throw Error(ErrorKind::ManifestCorrupt, "unsupported manifest format");
    const auto& s = j.at("scheme");
    ExtraCategories extras{s.at("extras").at("nonresident").get<bool>(),
                           s.at("extras").at("unknown").get<bool>()};
    DatasetManifest m;
    m.name = j.at("name").get<std::string>();
    m.scheme = CategoryScheme(s.at("genders").get<std::vector<std::string>>(),
                              s.at("races").get<std::vector<std::string>>(), extras);
    if (!j.at("years").is_null())
      m.years = YearRange{j["years"].at("first").get<int>(), j["years"].at("last").get<int>()};
    m.institutions = j.at("institutions").get<std::size_t>();
    m.records = j.at("records").get<std::size_t>();
    m.total = j.at("total").get<std::uint64_t>();
    const auto& p = j.at("policy");
    m.policy.include_second_majors = p.at("include_second_majors").get<bool>();
    m.policy.extras = {p.at("extras").at("nonresident").get<bool>(),
                       p.at("extras").at("unknown").get<bool>()};
    for (const auto& src : j.at("sources"))
      m.sources.push_back(SourceDigest{src.at("file").get<std::string>(),
                                       src.at("sha256").get<std::string>(),
                                       src.at("kind").get<std::string>(),
                                       src.at("rows").get<std::size_t>(),
                                       src.at("records").get<std::size_t>(),
                                       src.at("total").get<std::uint64_t>()});
    m.records_sha256 = j.at("records_sha256").get<std::string>();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ManifestCorrupt, std::string("manifest: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ManifestCorrupt) throw;
    throw Error(ErrorKind::ManifestCorrupt, std::string("manifest: ") + e.what());
  }
}

Dataset::Dataset(DatasetManifest manifest, std::vector<DegreeRecord> records,
                 std::map<std::string, std::string, std::less<>> names)
    : manifest_(std::move(manifest)), records_(std::move(records)), names_(std::move(names)) {
  build_index();
  digest_ = detail::sha256_hex(manifest_.to_json());
}

void Dataset::build_index() {
  for (std::size_t i = 0; i < records_.size();) {
    std::size_t j = i;
    YearRange span{records_[i].year, records_[i].year};
    while (j < records_.size() && records_[j].institution_id == records_[i].institution_id) {
      span.first = std::min(span.first, records_[j].year);
      span.last = std::max(span.last, records_[j].year);
      ++j;
    }
    index_.emplace(records_[i].institution_id, std::make_pair(i, j));
    year_spans_.emplace(records_[i].institution_id, span);
    i = j;
  }
}

Dataset Dataset::open(const std::filesystem::path& dir) {
  const auto manifest_path = dir / kManifestFile;
  const auto records_path = dir / kRecordsFile;
  if (!std::filesystem::is_directory(dir))
    throw Error(ErrorKind::Io, "dataset directory not found", dir.string());
  if (!std::filesystem::exists(manifest_path))
    throw Error(ErrorKind::ManifestCorrupt, "no manifest in dataset directory", dir.string());
  auto manifest = DatasetManifest::from_json(detail::read_file(manifest_path.string()));
  std::string csv = std::filesystem::exists(records_path)
                        ? detail::read_file(records_path.string())
                        : std::string();
  if (detail::sha256_hex(csv) != manifest.records_sha256)
    throw Error(ErrorKind::ManifestCorrupt, "records digest does not match the manifest",
                records_path.string());
  std::vector<DegreeRecord> records;
  try {
    records = detail::parse_canonical(csv, manifest.scheme, records_path.string()).records;
  } catch (const Error& e) {
    throw Error(ErrorKind::ManifestCorrupt, std::string("stored records: ") + e.what(),
                e.context());
  }
  if (detail::merge_records(records, manifest.scheme) != 0)
    throw Error(ErrorKind::ManifestCorrupt, "stored records repeat a key", records_path.string());
  auto expected = manifest;
  detail::refresh_manifest(expected, records, csv);
  if (expected.records != manifest.records || expected.total != manifest.total ||
      expected.institutions != manifest.institutions || expected.years != manifest.years)
    throw Error(ErrorKind::ManifestCorrupt, "manifest counts disagree with stored records",
                dir.string());

  std::map<std::string, std::string, std::less<>> names;
  const auto names_path = dir / kNamesFile;
  if (std::filesystem::exists(names_path)) {
    auto text = detail::read_file(names_path.string());
    auto lines = detail::split_lines(text);
    std::vector<std::string> f;
    for (std::size_t i = 1; i < lines.size(); ++i)
      if (detail::split_csv_line(lines[i], f) && f.size() >= 2 && !f[0].empty())
        names[f[0]] = f[1];
  }
  return Dataset(std::move(manifest), std::move(records), std::move(names));
}

Dataset Dataset::from_records(CategoryScheme scheme, std::vector<DegreeRecord> records,
                              std::string name) {
  for (const auto& r : records)
    if (!scheme.cell_index(r.cell))
      throw Error(ErrorKind::SchemeMismatch, "record label outside the active scheme",
                  cell_label(r.cell));
  detail::merge_records(records, scheme);
  DatasetManifest manifest;
  manifest.name = std::move(name);
  manifest.scheme = scheme;
  manifest.policy.extras = scheme.extras();
  detail::refresh_manifest(manifest, records, to_canonical_csv(records));
  return Dataset(std::move(manifest), std::move(records), {});
}

std::vector<std::string> Dataset::institutions() const {
  std::vector<std::string> out;
  out.reserve(index_.size());
  for (const auto& [id, range] : index_) out.push_back(id);
  return out;
}

bool Dataset::has_institution(std::string_view id) const { return index_.contains(id); }

std::optional<std::string> Dataset::institution_name(std::string_view id) const {
  auto it = names_.find(id);
  if (it == names_.end()) return std::nullopt;
  return it->second;
}

std::optional<YearRange> Dataset::institution_years(std::string_view id) const {
  auto it = year_spans_.find(id);
  if (it == year_spans_.end()) return std::nullopt;
  return it->second;
}

QueryResult Dataset::query(const RecordFilter& filter) const {
  QueryResult out;
  auto take = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      if (filter.matches(records_[i])) out.records.push_back(records_[i]);
  };
  if (filter.institutions.empty()) {
    take(0, records_.size());
    return out;
  }
  std::set<std::string_view> seen;
  for (const auto& id : filter.institutions) {
    if (!seen.insert(id).second) continue;
    auto it = index_.find(id);
    if (it == index_.end()) {
      out.warnings.push_back("unknown_institution: " + id);
      continue;
    }
    take(it->second.first, it->second.second);
  }
  // Restore canonical order when several institutions were requested.
  std::stable_sort(out.records.begin(), out.records.end(), [&](const auto& a, const auto& b) {
    return record_key(a, scheme()) < record_key(b, scheme());
  });
  return out;
}

CountTable Dataset::table(const RecordFilter& filter) const {
  if (filter.institutions.empty()) return aggregate(records_, scheme(), filter);
  std::vector<std::uint64_t> counts(scheme().cell_count(), 0);
  std::set<std::string_view> seen;
  for (const auto& id : filter.institutions) {
    if (!seen.insert(id).second) continue;
    auto it = index_.find(id);
    if (it == index_.end()) continue;
    auto slice = std::span(records_).subspan(it->second.first, it->second.second - it->second.first);
    auto part = aggregate(slice, scheme(), filter);
    for (std::size_t c = 0; c < counts.size(); ++c) counts[c] += part.at(c);
  }
  return CountTable(scheme(), Axis::Intersectional, std::move(counts));
}

std::string to_canonical_csv(std::span<const DegreeRecord> records) {
  std::string out(kCanonicalHeader);
  out += '\n';
  for (const auto& r : records) {
    out += detail::csv_field(r.institution_id);
    out += ',';
    out += std::to_string(r.year);
    out += ',';
    out += detail::csv_field(r.cip);
    out += ',';
    out += to_string(r.award_level);
    out += ',';
    out += detail::csv_field(r.cell.gender);
    out += ',';
    out += detail::csv_field(r.cell.race);
    out += ',';
    out += std::to_string(r.count);
    out += '\n';
  }
  return out;
}

}  // namespace gradlens
