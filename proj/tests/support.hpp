#pragma once

#include <cmath>
#include <vector>

#include "gencop/features.hpp"
#include "gencop/model.hpp"
#include "gencop/rng.hpp"

namespace gencop::test {

inline std::vector<double> random_values(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

template <typename T>
std::vector<T> cast(const std::vector<double>& v) {
  return std::vector<T>(v.begin(), v.end());
}

// Random parameters everywhere, including nonzero ReZero gates, so every path
// carries gradient.
template <typename T>
void randomize(ParamStore<T>& store, Rng& rng, double bound = 0.5) {
  for (auto& [name, t] : store) {
    for (auto& v : t.values) v = static_cast<T>(rng.uniform(-bound, bound));
  }
}

inline BackboneConfig tiny_backbone() { return BackboneConfig{2, 8, 8, 2, 16}; }

// Synthetic input for any task layout: random features, `rows[t]` nodes per
// type, random mask with at least one open entry.
inline ModelInput random_input(const TaskSpec& spec, const std::vector<int>& rows, Rng& rng, bool masked = true) {
  ModelInput in;
  int next = 0;
  for (std::size_t t = 0; t < spec.graph.types.size(); ++t) {
    TypeBlock b;
    b.cols = spec.node_features[t];
    for (int i = 0; i < rows[t]; ++i) b.nodes.push_back(next++);
    b.values = random_values(rng, static_cast<std::size_t>(rows[t] * b.cols), 0.0, 1.0);
    in.types.push_back(b);
  }
  for (std::size_t p = 0; p < spec.graph.pairs.size(); ++p) {
    PairBlock pb;
    const auto& pr = spec.graph.pairs[p];
    pb.channels = pr.edges ? spec.edge_features[p] : 0;
    pb.values = random_values(rng, static_cast<std::size_t>(rows[static_cast<std::size_t>(pr.source)] *
                                                            rows[static_cast<std::size_t>(pr.target)] * pb.channels),
                              0.0, 1.0);
    in.pairs.push_back(pb);
  }
  in.action_type = spec.action_type;
  in.options = spec.options;
  const auto n = static_cast<std::size_t>(rows[static_cast<std::size_t>(spec.action_type)] * spec.options);
  in.mask.assign(n, 0.0);
  if (masked) {
    for (std::size_t i = 1; i < n; ++i) {
      if (rng.uniform() < 0.3) in.mask[i] = -INFINITY;
    }
  }
  return in;
}

}  // namespace gencop::test
