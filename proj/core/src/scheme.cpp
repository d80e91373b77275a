#include "gradlens/scheme.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <utility>

#include "gradlens/error.hpp"

namespace gradlens {
namespace {

// Canonical IPEDS label -> accepted shorthands.
struct Alias {
  std::string_view canonical;
  std::array<std::string_view, 3> shorthands;
};

constexpr std::array<Alias, 11> kAliases{{
    {"Men", {"Male", "M", "men"}},
    {"Women", {"Female", "W", "women"}},
    {"American Indian or Alaska Native", {"American Indian", "AIAN", "Native American"}},
    {"Asian", {"asian", "", ""}},
    {"Black or African American", {"Black", "African American", "black"}},
    {"Hispanic or Latino", {"Hispanic", "Latino", "hispanic"}},
    {"Native Hawaiian or Other Pacific Islander", {"Pacific Islander", "NHPI", "Native Hawaiian"}},
    {"White", {"white", "", ""}},
    {"Two or more races", {"Two or more", "Multiracial", "2+"}},
    {kNonresidentLabel, {"Nonresident", "Nonresident alien", "U.S. Nonresident alien"}},
    {kRaceUnknownLabel, {"Unknown", "Race unknown", ""}},
}};

std::optional<std::size_t> index_of(const std::vector<std::string>& labels, std::string_view label) {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels.begin());
}

std::optional<std::string> resolve(const std::vector<std::string>& labels, std::string_view label) {
  if (index_of(labels, label)) return std::string(label);
  if (label.empty()) return std::nullopt;
  for (const auto& alias : kAliases) {
    if (std::find(alias.shorthands.begin(), alias.shorthands.end(), label) == alias.shorthands.end())
      continue;
    if (index_of(labels, alias.canonical)) return std::string(alias.canonical);
  }
  return std::nullopt;
}

void check_axis(const std::vector<std::string>& labels, std::string_view axis) {
  if (labels.empty())
    throw Error(ErrorKind::SchemeMismatch, "category axis has no labels", std::string(axis));
  std::set<std::string_view> seen;
  for (const auto& label : labels) {
    if (label.empty())
      throw Error(ErrorKind::SchemeMismatch, "empty category label", std::string(axis));
    if (!seen.insert(label).second)
      throw Error(ErrorKind::SchemeMismatch, "duplicate category label '" + label + "'",
                  std::string(axis));
  }
}

}  // namespace

std::string_view to_string(Axis axis) noexcept {
  switch (axis) {
    case Axis::Gender: return "gender";
    case Axis::Race: return "race";
    case Axis::Intersectional: return "intersectional";
  }
  return "?";
}

std::optional<Axis> parse_axis(std::string_view text) noexcept {
  if (text == "gender") return Axis::Gender;
  if (text == "race" || text == "ethnicity") return Axis::Race;
  if (text == "intersectional" || text == "cell") return Axis::Intersectional;
  return std::nullopt;
}

std::string cell_label(const Cell& cell) { return cell.race + "," + cell.gender; }

CategoryScheme CategoryScheme::ipeds_default(ExtraCategories extras) {
  std::vector<std::string> races{"American Indian or Alaska Native",
                                 "Asian",
                                 "Black or African American",
                                 "Hispanic or Latino",
                                 "Native Hawaiian or Other Pacific Islander",
                                 "White",
                                 "Two or more races"};
  if (extras.nonresident) races.emplace_back(kNonresidentLabel);
  if (extras.unknown) races.emplace_back(kRaceUnknownLabel);
  return CategoryScheme({"Men", "Women"}, std::move(races), extras);
}

CategoryScheme::CategoryScheme(std::vector<std::string> genders, std::vector<std::string> races,
                               ExtraCategories extras)
    : genders_(std::move(genders)), races_(std::move(races)), extras_(extras) {
  check_axis(genders_, "gender");
  check_axis(races_, "race");
}

std::size_t CategoryScheme::size(Axis axis) const noexcept {
  switch (axis) {
    case Axis::Gender: return genders_.size();
    case Axis::Race: return races_.size();
    case Axis::Intersectional: return cell_count();
  }
  return 0;
}

std::optional<std::size_t> CategoryScheme::gender_index(std::string_view label) const noexcept {
  return index_of(genders_, label);
}

std::optional<std::size_t> CategoryScheme::race_index(std::string_view label) const noexcept {
  return index_of(races_, label);
}

std::optional<std::size_t> CategoryScheme::cell_index(const Cell& cell) const noexcept {
  auto g = gender_index(cell.gender);
  auto r = race_index(cell.race);
  if (!g || !r) return std::nullopt;
  return *r * genders_.size() + *g;
}

Cell CategoryScheme::cell_at(std::size_t index) const {
  if (index >= cell_count()) throw std::out_of_range("cell index out of range");
  return Cell{genders_[index % genders_.size()], races_[index / genders_.size()]};
}

std::vector<std::string> CategoryScheme::labels(Axis axis) const {
  switch (axis) {
    case Axis::Gender: return genders_;
    case Axis::Race: return races_;
    case Axis::Intersectional: break;
  }
  std::vector<std::string> out;
  out.reserve(cell_count());
  for (std::size_t i = 0; i < cell_count(); ++i) out.push_back(cell_label(cell_at(i)));
  return out;
}

std::optional<std::string> CategoryScheme::resolve_gender(std::string_view label) const {
  return resolve(genders_, label);
}

std::optional<std::string> CategoryScheme::resolve_race(std::string_view label) const {
  return resolve(races_, label);
}

bool is_extra_race_label(std::string_view label) noexcept {
  for (const auto& alias : kAliases) {
    if (alias.canonical != kNonresidentLabel && alias.canonical != kRaceUnknownLabel) continue;
    if (label == alias.canonical) return true;
    for (auto s : alias.shorthands)
      if (!s.empty() && s == label) return true;
  }
  return false;
}

}  // namespace gradlens
