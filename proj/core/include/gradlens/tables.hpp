#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gradlens/scheme.hpp"

namespace gradlens {

/// Degree counts over one axis of a scheme (or over its intersectional cells).
/// Immutable once built; total is the exact integer sum of the counts.
class CountTable {
 public:
  /// All-zero table.
  CountTable(CategoryScheme scheme, Axis axis);
  CountTable(CategoryScheme scheme, Axis axis, std::vector<std::uint64_t> counts);

  const CategoryScheme& scheme() const noexcept { return scheme_; }
  Axis axis() const noexcept { return axis_; }
  std::size_t size() const noexcept { return counts_.size(); }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }
  std::uint64_t total() const noexcept { return total_; }

  std::uint64_t at(std::size_t index) const { return counts_.at(index); }
  std::string label(std::size_t index) const;
  std::vector<std::string> labels() const { return scheme_.labels(axis_); }

  /// Count for a category label along this table's axis (cell_label() form
  /// for intersectional tables). Unknown labels throw CategoryMismatch.
  std::uint64_t count(std::string_view label) const;
  std::uint64_t count(const Cell& cell) const;

  friend bool operator==(const CountTable&, const CountTable&) = default;

 private:
  CategoryScheme scheme_;
  Axis axis_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

/// Probability vector over labelled categories. The labels are the structural
/// descriptor: two distributions are comparable only if their labels match.
class Distribution {
 public:
  static constexpr double kSumTolerance = 1e-9;

  /// Throws InvalidDistribution unless every value is in [0,1] and the values
  /// sum to 1 within kSumTolerance.
  Distribution(std::vector<std::string> labels, std::vector<double> probabilities);

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::span<const double> probabilities() const noexcept { return probabilities_; }
  std::size_t size() const noexcept { return probabilities_.size(); }
  double operator[](std::size_t index) const { return probabilities_[index]; }
  double probability(std::string_view label) const;

  /// Number of categories carrying nonzero mass.
  std::size_t support_size() const noexcept;

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<double> probabilities_;
};

/// Collapses an intersectional table onto the gender or race axis. Asking
/// for the table's own axis returns a copy; any other request on a
/// single-axis table throws CategoryMismatch.
CountTable marginalize(const CountTable& table, Axis axis);

/// count/total per category. Throws ZeroPopulation on an empty table.
Distribution normalize(const CountTable& table);

}  // namespace gradlens
