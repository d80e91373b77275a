#pragma once

#include <cmath>
#include <cstddef>

#include "gradlens/tables.hpp"

namespace gradlens {

/// Information in natural-log units.
struct Nats {
  double value = 0.0;

  friend auto operator<=>(const Nats&, const Nats&) = default;
};

/// Entropy normalized by ln(k): 0 when one category holds everything, 1 when
/// all k categories are equally represented.
struct EvennessScore {
  double value = 0.0;
  std::size_t k = 2;

  double percent() const noexcept { return 100.0 * value; }
};

/// sqrt(ln 2), the largest possible Jensen-Shannon distance in nats.
inline const double kMaxJsDistance = std::sqrt(std::log(2.0));

/// -sum p ln p, with zero-probability categories contributing exactly 0.
Nats shannon_entropy(const Distribution& dist);

/// Shannon equitability H/ln(k). k is the number of categories the population
/// could occupy, so empty categories lower the score; it is not inferred from
/// the support. Throws DegenerateK when k < 2 and CategoryMismatch when more
/// than k categories carry mass.
EvennessScore equitability(const Distribution& dist, std::size_t k);

/// H(M) - (H(P) + H(Q))/2 with M the midpoint distribution. Both inputs must
/// carry identical labels (zero-filled over the full scheme); otherwise
/// CategoryMismatch. Result lies in [0, ln 2] and is bit-symmetric.
Nats jensen_shannon_divergence(const Distribution& p, const Distribution& q);

/// sqrt of the divergence; a metric bounded by kMaxJsDistance.
double js_distance(const Distribution& p, const Distribution& q);

}  // namespace gradlens
