#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>

#include "gencop/error.hpp"
#include "oracle_common.hpp"

namespace gencop::reference {

double atsp_permutations(const Instance& s) {
  if (s.task != "atsp" || s.n > 11) throw UsageError("atsp_permutations: atsp with at most 11 nodes");
  std::vector<int> perm(static_cast<std::size_t>(s.n - 1));
  std::iota(perm.begin(), perm.end(), 1);
  double best = std::numeric_limits<double>::infinity();
  do {
    double len = s.edge(0, perm.front());
    for (std::size_t i = 1; i < perm.size(); ++i) len += s.edge(perm[i - 1], perm[i]);
    len += s.edge(perm.back(), 0);
    best = std::min(best, len);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double kp_subsets(const Instance& s) {
  if (s.task != "kp" || s.n > 24) throw UsageError("kp_subsets: kp with at most 24 items");
  double best = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << s.n); ++mask) {
    double w = 0.0, v = 0.0;
    for (int j = 0; j < s.n; ++j)
      if (mask >> j & 1u) {
        w += s.attr(j, 1);
        v += s.attr(j, 0);
      }
    if (w <= s.data->capacity + detail::kTol) best = std::max(best, v);
  }
  return best;
}

int mis_exhaustive(const Instance& s) {
  if (s.n > 24) throw UsageError("mis_exhaustive: at most 24 nodes");
  const auto edges = detail::edge_list(s);
  int best = 0;
  for (std::uint32_t mask = 0; mask < (1u << s.n); ++mask) {
    const int size = std::popcount(mask);
    if (size <= best) continue;
    bool ok = true;
    for (auto [a, b] : edges)
      if ((mask >> a & 1u) && (mask >> b & 1u)) {
        ok = false;
        break;
      }
    if (ok) best = size;
  }
  return best;
}

}  // namespace gencop::reference
