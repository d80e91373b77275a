#include "gradlens/tables.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gradlens/error.hpp"

namespace gradlens {

CountTable::CountTable(CategoryScheme scheme, Axis axis)
    : scheme_(std::move(scheme)), axis_(axis), counts_(scheme_.size(axis), 0) {}

CountTable::CountTable(CategoryScheme scheme, Axis axis, std::vector<std::uint64_t> counts)
    : scheme_(std::move(scheme)), axis_(axis), counts_(std::move(counts)) {
  if (counts_.size() != scheme_.size(axis_))
    throw Error(ErrorKind::CategoryMismatch,
                "count vector has " + std::to_string(counts_.size()) + " entries, " +
                    std::string(to_string(axis_)) + " axis has " +
                    std::to_string(scheme_.size(axis_)));
  total_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::string CountTable::label(std::size_t index) const {
  switch (axis_) {
    case Axis::Gender: return scheme_.genders().at(index);
    case Axis::Race: return scheme_.races().at(index);
    case Axis::Intersectional: return cell_label(scheme_.cell_at(index));
  }
  return {};
}

std::uint64_t CountTable::count(std::string_view label) const {
  std::optional<std::size_t> index;
  switch (axis_) {
    case Axis::Gender: index = scheme_.gender_index(label); break;
    case Axis::Race: index = scheme_.race_index(label); break;
    case Axis::Intersectional: {
      auto comma = label.find(',');
      if (comma != std::string_view::npos)
        index = scheme_.cell_index(
            Cell{std::string(label.substr(comma + 1)), std::string(label.substr(0, comma))});
      break;
    }
  }
  if (!index)
    throw Error(ErrorKind::CategoryMismatch, "label not on the table's axis", std::string(label));
  return counts_[*index];
}

std::uint64_t CountTable::count(const Cell& cell) const {
  if (axis_ != Axis::Intersectional)
    throw Error(ErrorKind::CategoryMismatch, "cell lookup on a single-axis table",
                cell_label(cell));
  auto index = scheme_.cell_index(cell);
  if (!index) throw Error(ErrorKind::CategoryMismatch, "cell not in scheme", cell_label(cell));
  return counts_[*index];
}

Distribution::Distribution(std::vector<std::string> labels, std::vector<double> probabilities)
    : labels_(std::move(labels)), probabilities_(std::move(probabilities)) {
  if (labels_.size() != probabilities_.size())
    throw Error(ErrorKind::InvalidDistribution, "label/probability length mismatch");
  if (probabilities_.empty()) throw Error(ErrorKind::InvalidDistribution, "no categories");
  double sum = 0.0;
  for (std::size_t i = 0; i < probabilities_.size(); ++i) {
    double p = probabilities_[i];
    if (!(p >= 0.0 && p <= 1.0))
      throw Error(ErrorKind::InvalidDistribution, "probability outside [0,1]", labels_[i]);
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    throw Error(ErrorKind::InvalidDistribution,
                "probabilities sum to " + std::to_string(sum) + ", not 1");
}

double Distribution::probability(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end())
    throw Error(ErrorKind::CategoryMismatch, "label not in distribution", std::string(label));
  return probabilities_[static_cast<std::size_t>(it - labels_.begin())];
}

std::size_t Distribution::support_size() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(probabilities_.begin(), probabilities_.end(), [](double p) { return p > 0.0; }));
}

CountTable marginalize(const CountTable& table, Axis axis) {
  if (table.axis() == axis) return table;
  if (table.axis() != Axis::Intersectional)
    throw Error(ErrorKind::CategoryMismatch, "cannot marginalize a " +
                                                 std::string(to_string(table.axis())) +
                                                 " table onto " + std::string(to_string(axis)));
  const auto& scheme = table.scheme();
  const std::size_t genders = scheme.genders().size();
  std::vector<std::uint64_t> out(scheme.size(axis), 0);
  auto counts = table.counts();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    // race-major layout: i = race * genders + gender
    std::size_t target = axis == Axis::Gender ? i % genders : i / genders;
    out[target] += counts[i];
  }
  return CountTable(scheme, axis, std::move(out));
}

Distribution normalize(const CountTable& table) {
  if (table.total() == 0)
    throw Error(ErrorKind::ZeroPopulation, "cannot normalize a table with zero total");
  const double total = static_cast<double>(table.total());
  std::vector<double> probabilities;
  probabilities.reserve(table.size());
  for (auto count : table.counts()) probabilities.push_back(static_cast<double>(count) / total);
  return Distribution(table.labels(), std::move(probabilities));
}

}  // namespace gradlens
