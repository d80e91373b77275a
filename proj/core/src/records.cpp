#include "gradlens/records.hpp"

#include <algorithm>
#include <charconv>

#include "gradlens/error.hpp"

namespace gradlens {
namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool valid_prefix(std::string_view prefix) {
  if (prefix.size() < 2 || !all_digits(prefix.substr(0, 2))) return false;
  if (prefix.size() == 2) return true;
  if (prefix[2] != '.') return false;
  auto tail = prefix.substr(3);
  return all_digits(tail) && tail.size() <= 4;
}

std::optional<int> parse_int(std::string_view text) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace

std::string_view to_string(AwardLevel level) noexcept {
  switch (level) {
    case AwardLevel::Certificate: return "certificate";
    case AwardLevel::Associates: return "associates";
    case AwardLevel::Bachelors: return "bachelors";
    case AwardLevel::Masters: return "masters";
    case AwardLevel::Doctoral: return "doctoral";
    case AwardLevel::Other: return "other";
  }
  return "other";
}

std::optional<AwardLevel> parse_award_level(std::string_view text) noexcept {
  for (auto level : {AwardLevel::Certificate, AwardLevel::Associates, AwardLevel::Bachelors,
                     AwardLevel::Masters, AwardLevel::Doctoral, AwardLevel::Other})
    if (text == to_string(level)) return level;
  return std::nullopt;
}

AwardLevel award_level_from_ipeds(int code) noexcept {
  switch (code) {
    case 1: case 2: case 4: case 6: case 8: case 20: case 21: return AwardLevel::Certificate;
    case 3: return AwardLevel::Associates;
    case 5: return AwardLevel::Bachelors;
    case 7: return AwardLevel::Masters;
    case 9: case 10: case 17: case 18: case 19: return AwardLevel::Doctoral;
    default: return AwardLevel::Other;
  }
}

CipFilter::CipFilter(std::vector<std::string> prefixes) : prefixes_(std::move(prefixes)) {
  if (prefixes_.empty()) throw Error(ErrorKind::InvalidFilter, "CIP filter needs a prefix");
  for (const auto& p : prefixes_)
    if (!valid_prefix(p)) throw Error(ErrorKind::InvalidFilter, "bad CIP prefix", p);
}

bool CipFilter::matches(std::string_view cip) const noexcept {
  return std::any_of(prefixes_.begin(), prefixes_.end(),
                     [&](const std::string& p) { return cip.starts_with(p); });
}

std::string CipFilter::normalize_code(std::string_view code) {
  while (!code.empty() && (code.front() == ' ' || code.front() == '"')) code.remove_prefix(1);
  while (!code.empty() && (code.back() == ' ' || code.back() == '"')) code.remove_suffix(1);
  std::string out(code);
  auto dot = out.find('.');
  if (dot == 1 || (dot == std::string::npos && out.size() == 1)) out.insert(out.begin(), '0');
  return out;
}

FieldScope FieldScope::parse(std::string_view text) {
  if (text == "cip11" || text == "computing") return computing();
  if (text == "all" || text == "all-degrees") return all_degrees();
  if (text.starts_with("cip:")) {
    std::vector<std::string> prefixes;
    auto rest = text.substr(4);
    while (!rest.empty()) {
      auto comma = rest.find(',');
      prefixes.emplace_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    CipFilter filter(std::move(prefixes));
    if (filter.prefixes() == std::vector<std::string>{"11"}) return computing();
    bool computing_only = std::all_of(filter.prefixes().begin(), filter.prefixes().end(),
                                      [](const std::string& p) { return p.starts_with("11"); });
    return computing_only ? computing(std::move(filter)) : field(std::move(filter));
  }
  throw Error(ErrorKind::InvalidFilter, "unknown field scope (expected cip11, all or cip:<prefix>)",
              std::string(text));
}

std::string FieldScope::describe() const {
  if (kind_ == Kind::AllDegrees) return "all";
  if (kind_ == Kind::Computing && cips_ == CipFilter{}) return "cip11";
  std::string out = "cip:";
  for (std::size_t i = 0; i < cips_.prefixes().size(); ++i) {
    if (i) out += ',';
    out += cips_.prefixes()[i];
  }
  return out;
}

YearRange YearRange::parse(std::string_view text) {
  auto dash = text.find('-');
  auto first = parse_int(text.substr(0, dash));
  auto last = dash == std::string_view::npos ? first : parse_int(text.substr(dash + 1));
  if (!first || !last) throw Error(ErrorKind::InvalidFilter, "bad year range", std::string(text));
  YearRange range{*first, *last};
  if (range.empty()) throw Error(ErrorKind::EmptyRange, "year range is empty", std::string(text));
  return range;
}

bool RecordFilter::matches(const DegreeRecord& record) const noexcept {
  if (years && !years->contains(record.year)) return false;
  if (award_level && record.award_level != *award_level) return false;
  if (!scope.matches(record.cip)) return false;
  if (!institutions.empty() &&
      std::find(institutions.begin(), institutions.end(), record.institution_id) ==
          institutions.end())
    return false;
  return true;
}

CountTable aggregate(std::span<const DegreeRecord> records, const CategoryScheme& scheme,
                     const RecordFilter& filter) {
  std::vector<std::uint64_t> counts(scheme.cell_count(), 0);
  for (const auto& record : records) {
    auto index = scheme.cell_index(record.cell);
    if (!index)
      throw Error(ErrorKind::SchemeMismatch, "record label outside the active scheme",
                  cell_label(record.cell));
    if (filter.matches(record)) counts[*index] += record.count;
  }
  return CountTable(scheme, Axis::Intersectional, std::move(counts));
}

}  // namespace gradlens
