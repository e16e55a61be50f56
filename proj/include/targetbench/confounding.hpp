#pragma once

#include <cstdint>
#include <vector>

#include "targetbench/dataset.hpp"

namespace targetbench {

struct ConfoundingSpec {
  double k = 0.0;           // fraction removed per arm, in [0, 1)
  std::uint64_t seed = 0;   // tie-breaking only
};

// Builds a biased observational-style dataset by systematic removal: the
// ceil(k * arm size) treated rows with the largest benefit and the same
// fraction of control rows with the smallest benefit are dropped. Benefit is
// the effect-signed pseudo-outcome difference, so datasets where treatment
// lowers the outcome are handled by the sign convention. Ties are broken by a
// seeded shuffle before sorting; surviving rows keep their original order.
Dataset remove_confounded(const Dataset& ds, const std::vector<double>& benefit,
                          const ConfoundingSpec& spec);

}  // namespace targetbench
