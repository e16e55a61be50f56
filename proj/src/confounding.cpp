#include "targetbench/confounding.hpp"

#include <algorithm>
#include <numeric>

#include "targetbench/rng.hpp"
#include "targetbench/stats.hpp"

namespace targetbench {

Dataset remove_confounded(const Dataset& ds, const std::vector<double>& benefit,
                          const ConfoundingSpec& spec) {
  if (!(spec.k >= 0.0 && spec.k < 1.0))
    fail("remove_confounded: k must lie in [0, 1)");
  if (benefit.size() != ds.n())
    fail("remove_confounded: benefit length does not match dataset rows");
  ds.require_estimable();

  std::vector<std::size_t> treated, control;
  for (std::size_t i = 0; i < ds.n(); ++i)
    (ds.W[i] == 1 ? treated : control).push_back(i);

  const std::size_t drop_t = ceil_fraction(spec.k, treated.size());
  const std::size_t drop_c = ceil_fraction(spec.k, control.size());
  if (drop_t >= treated.size() || drop_c >= control.size())
    fail("remove_confounded: k would empty a treatment arm");
  if (drop_t == 0 && drop_c == 0) {
    std::vector<std::size_t> all(ds.n());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return ds.subset(all);
  }

  RandomStream tie_rng(derive_seed(spec.seed, seed_tag::confound_ties));
  tie_rng.shuffle(treated);
  tie_rng.shuffle(control);

  // Largest-benefit treated rows go; smallest-benefit control rows go.
  std::stable_sort(treated.begin(), treated.end(),
                   [&](std::size_t a, std::size_t b) {
                     return benefit[a] > benefit[b];
                   });
  std::stable_sort(control.begin(), control.end(),
                   [&](std::size_t a, std::size_t b) {
                     return benefit[a] < benefit[b];
                   });

  std::vector<std::size_t> keep;
  keep.reserve(ds.n() - drop_t - drop_c);
  keep.insert(keep.end(), treated.begin() + static_cast<std::ptrdiff_t>(drop_t),
              treated.end());
  keep.insert(keep.end(), control.begin() + static_cast<std::ptrdiff_t>(drop_c),
              control.end());
  std::sort(keep.begin(), keep.end());
  return ds.subset(keep);
}

}  // namespace targetbench
