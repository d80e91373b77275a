#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gradlens {

enum class Axis { Gender, Race, Intersectional };

std::string_view to_string(Axis axis) noexcept;
std::optional<Axis> parse_axis(std::string_view text) noexcept;

/// One intersectional (gender, race/ethnicity) combination.
struct Cell {
  std::string gender;
  std::string race;

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// "Race,Gender", the same syntax the CLI accepts for group descriptors.
std::string cell_label(const Cell& cell);

// IPEDS reporting categories that sit outside the seven race/ethnicity groups.
inline constexpr std::string_view kNonresidentLabel = "U.S. Nonresident";
inline constexpr std::string_view kRaceUnknownLabel = "Race/ethnicity unknown";

struct ExtraCategories {
  bool nonresident = false;
  bool unknown = false;

  friend bool operator==(const ExtraCategories&, const ExtraCategories&) = default;
};

/// The demographic axes in use. Intersectional cells are ordered race-major
/// (for each race, every gender), which is the order charts draw them in.
class CategoryScheme {
 public:
  /// Men/Women crossed with the seven IPEDS race/ethnicity categories,
  /// optionally followed by the Nonresident and Unknown categories.
  static CategoryScheme ipeds_default(ExtraCategories extras = {});

  CategoryScheme(std::vector<std::string> genders, std::vector<std::string> races,
                 ExtraCategories extras = {});

  const std::vector<std::string>& genders() const noexcept { return genders_; }
  const std::vector<std::string>& races() const noexcept { return races_; }
  ExtraCategories extras() const noexcept { return extras_; }

  std::size_t size(Axis axis) const noexcept;
  std::size_t cell_count() const noexcept { return genders_.size() * races_.size(); }

  std::optional<std::size_t> gender_index(std::string_view label) const noexcept;
  std::optional<std::size_t> race_index(std::string_view label) const noexcept;
  std::optional<std::size_t> cell_index(const Cell& cell) const noexcept;
  Cell cell_at(std::size_t index) const;

  /// Category labels along an axis; intersectional labels use cell_label().
  std::vector<std::string> labels(Axis axis) const;

  /// Maps a user-supplied label to the scheme's canonical label. Exact
  /// matches win; otherwise the short IPEDS aliases ("Hispanic", "Black",
  /// "Male", ...) are tried.
  std::optional<std::string> resolve_gender(std::string_view label) const;
  std::optional<std::string> resolve_race(std::string_view label) const;

  friend bool operator==(const CategoryScheme&, const CategoryScheme&) = default;

 private:
  std::vector<std::string> genders_;
  std::vector<std::string> races_;
  ExtraCategories extras_;
};

/// True for the Nonresident/Unknown IPEDS labels (or their aliases).
bool is_extra_race_label(std::string_view label) noexcept;

}  // namespace gradlens
