#pragma once

#include <utility>
#include <vector>

#include "gencop/oracle.hpp"

namespace gencop::detail {

constexpr double kTol = 1e-9;

inline double dist(const Instance& s, int a, int b) { return s.edge(a, b); }

std::vector<std::pair<int, int>> edge_list(const Instance& s);

// Finish time per operation when dispatched in `order`.
std::vector<double> shop_finish(const Instance& s, const std::vector<int>& order);

// Solvers work on fresh instances only.
void require_initial(const Instance& s);

}  // namespace gencop::detail
