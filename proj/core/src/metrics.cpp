#include "gradlens/metrics.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "gradlens/error.hpp"

namespace gradlens {
namespace {

double entropy_of(std::span<const double> probabilities) {
  double sum = 0.0;
  for (double p : probabilities)
    if (p > 0.0) sum += p * std::log(p);
  // 0.0 - sum turns a -0.0 accumulator into +0.0 for degenerate inputs.
  return 0.0 - sum;
}

}  // namespace

Nats shannon_entropy(const Distribution& dist) {
  return Nats{std::max(0.0, entropy_of(dist.probabilities()))};
}

EvennessScore equitability(const Distribution& dist, std::size_t k) {
  if (k < 2)
    throw Error(ErrorKind::DegenerateK, "equitability needs k >= 2", "k=" + std::to_string(k));
  if (dist.support_size() > k)
    throw Error(ErrorKind::CategoryMismatch,
                std::to_string(dist.support_size()) + " categories carry mass but k=" +
                    std::to_string(k));
  double h = shannon_entropy(dist).value;
  return EvennessScore{std::clamp(h / std::log(static_cast<double>(k)), 0.0, 1.0), k};
}

Nats jensen_shannon_divergence(const Distribution& p, const Distribution& q) {
  if (p.labels() != q.labels())
    throw Error(ErrorKind::CategoryMismatch, "distributions are over different categories");
  std::vector<double> midpoint(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) midpoint[i] = 0.5 * (p[i] + q[i]);
  double hp = entropy_of(p.probabilities());
  double hq = entropy_of(q.probabilities());
  double jsd = entropy_of(midpoint) - 0.5 * (hp + hq);
  return Nats{std::clamp(jsd, 0.0, std::log(2.0))};
}

double js_distance(const Distribution& p, const Distribution& q) {
  return std::sqrt(jensen_shannon_divergence(p, q).value);
}

}  // namespace gradlens
