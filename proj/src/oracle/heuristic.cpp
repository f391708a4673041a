#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "gencop/error.hpp"
#include "oracle_common.hpp"

namespace gencop {
namespace {

using detail::dist;
using Route = std::vector<int>;

double closed_length(const Instance& s, const Route& r) {
  if (r.empty()) return 0.0;
  double total = dist(s, 0, r.front());
  for (std::size_t i = 1; i < r.size(); ++i) total += dist(s, r[i - 1], r[i]);
  return total + dist(s, r.back(), 0);
}

double latency(const Instance& s, const Route& r) {
  double total = 0.0;
  int prev = 0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    total += static_cast<double>(r.size() - k) * dist(s, prev, r[k]);
    prev = r[k];
  }
  return total;
}

// Segment reversal until no move improves `cost` (full re-evaluation, so
// asymmetric costs are fine).
void two_opt(Route& r, const std::function<double(const Route&)>& cost) {
  double cur = cost(r);
  for (bool improved = true; improved;) {
    improved = false;
    for (std::size_t i = 0; i + 1 < r.size(); ++i)
      for (std::size_t j = i + 1; j < r.size(); ++j) {
        std::reverse(r.begin() + static_cast<std::ptrdiff_t>(i), r.begin() + static_cast<std::ptrdiff_t>(j) + 1);
        const double c = cost(r);
        if (c < cur - 1e-12) {
          cur = c;
          improved = true;
        } else {
          std::reverse(r.begin() + static_cast<std::ptrdiff_t>(i), r.begin() + static_cast<std::ptrdiff_t>(j) + 1);
        }
      }
  }
}

Route nearest_neighbour(const Instance& s) {
  Route r;
  std::vector<char> used(static_cast<std::size_t>(s.n), 0);
  used[0] = 1;
  int cur = 0;
  for (int k = 1; k < s.n; ++k) {
    int best = -1;
    for (int j = 1; j < s.n; ++j)
      if (!used[static_cast<std::size_t>(j)] && (best < 0 || dist(s, cur, j) < dist(s, cur, best))) best = j;
    used[static_cast<std::size_t>(best)] = 1;
    r.push_back(best);
    cur = best;
  }
  return r;
}

Solution sweep(const Instance& s) {
  std::vector<int> order;
  for (int j = 1; j < s.n; ++j) order.push_back(j);
  auto angle = [&](int j) { return std::atan2(s.attr(j, 1) - s.attr(0, 1), s.attr(j, 0) - s.attr(0, 0)); };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return angle(a) < angle(b); });
  Solution sol;
  Route cur;
  double load = 0.0;
  for (int j : order) {
    const double d = s.attr(j, 2);
    if (!cur.empty() && load + d > s.data->capacity + detail::kTol) {
      sol.routes.push_back(cur);
      cur.clear();
      load = 0.0;
    }
    cur.push_back(j);
    load += d;
  }
  if (!cur.empty()) sol.routes.push_back(cur);
  for (auto& r : sol.routes) two_opt(r, [&](const Route& x) { return closed_length(s, x); });
  return sol;
}

// Prize per unit distance, restricted to customers that keep the return
// leg inside the budget.
Solution orienteering_greedy(const Instance& s) {
  Route r;
  std::vector<char> used(static_cast<std::size_t>(s.n), 0);
  double left = s.data->capacity;
  int cur = 0;
  for (;;) {
    int best = -1;
    double score = -1.0;
    for (int j = 1; j < s.n; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      if (dist(s, cur, j) + dist(s, j, 0) > left) continue;
      const double v = s.attr(j, 2) / (dist(s, cur, j) + 1e-9);
      if (v > score) {
        score = v;
        best = j;
      }
    }
    if (best < 0) break;
    left -= dist(s, cur, best);
    used[static_cast<std::size_t>(best)] = 1;
    r.push_back(best);
    cur = best;
  }
  const double before = closed_length(s, r);
  Route shorter = r;
  two_opt(shorter, [&](const Route& x) { return closed_length(s, x); });
  Solution sol;
  sol.routes.push_back(closed_length(s, shorter) <= before ? shorter : r);
  return sol;
}

// Collect prize per unit distance until the requirement holds, then keep
// adding customers whose penalty exceeds the detour.
Solution prize_greedy(const Instance& s) {
  Route r;
  std::vector<char> used(static_cast<std::size_t>(s.n), 0);
  double need = s.data->capacity;
  int cur = 0;
  while (need > 0.5 * detail::kTol) {
    int best = -1;
    double score = -1.0;
    for (int j = 1; j < s.n; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double v = s.attr(j, 2) / (dist(s, cur, j) + 1e-9);
      if (v > score) {
        score = v;
        best = j;
      }
    }
    if (best < 0) break;
    need -= s.attr(best, 2);
    used[static_cast<std::size_t>(best)] = 1;
    r.push_back(best);
    cur = best;
  }
  for (;;) {
    int best = -1;
    double saving = 0.0;
    for (int j = 1; j < s.n; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double v = s.attr(j, 3) - (dist(s, cur, j) + dist(s, j, 0) - dist(s, cur, 0));
      if (v > saving) {
        saving = v;
        best = j;
      }
    }
    if (best < 0) break;
    used[static_cast<std::size_t>(best)] = 1;
    r.push_back(best);
    cur = best;
  }
  two_opt(r, [&](const Route& x) { return closed_length(s, x); });
  Solution sol;
  sol.routes.push_back(r);
  return sol;
}

Solution density_greedy(const Instance& s) {
  std::vector<int> order(static_cast<std::size_t>(s.n));
  std::iota(order.begin(), order.end(), 0);
  auto density = [&](int j) { return s.attr(j, 1) > 0.0 ? s.attr(j, 0) / s.attr(j, 1) : std::numeric_limits<double>::infinity(); };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return density(a) > density(b); });
  Solution sol;
  double left = s.data->capacity;
  for (int j : order)
    if (s.attr(j, 1) <= left + detail::kTol) {
      sol.items.push_back(j);
      left -= s.attr(j, 1);
    }
  std::sort(sol.items.begin(), sol.items.end());
  return sol;
}

Solution cover_greedy(const Instance& s) {
  const auto edges = detail::edge_list(s);
  std::vector<char> in(static_cast<std::size_t>(s.n), 0);
  std::vector<int> picked;
  for (;;) {
    std::vector<int> deg(static_cast<std::size_t>(s.n), 0);
    for (auto [a, b] : edges)
      if (!in[static_cast<std::size_t>(a)] && !in[static_cast<std::size_t>(b)]) {
        ++deg[static_cast<std::size_t>(a)];
        ++deg[static_cast<std::size_t>(b)];
      }
    const auto it = std::max_element(deg.begin(), deg.end());
    if (*it == 0) break;
    const int v = static_cast<int>(it - deg.begin());
    in[static_cast<std::size_t>(v)] = 1;
    picked.push_back(v);
  }
  // drop redundant picks so every target stays needed in any order
  for (auto it = picked.rbegin(); it != picked.rend(); ++it) {
    bool needed = false;
    for (auto [a, b] : edges)
      if ((a == *it && !in[static_cast<std::size_t>(b)]) || (b == *it && !in[static_cast<std::size_t>(a)])) needed = true;
    if (!needed) in[static_cast<std::size_t>(*it)] = 0;
  }
  Solution sol;
  for (int j = 0; j < s.n; ++j)
    if (in[static_cast<std::size_t>(j)]) sol.items.push_back(j);
  return sol;
}

Solution independent_greedy(const Instance& s) {
  std::vector<char> live(static_cast<std::size_t>(s.n), 1);
  Solution sol;
  for (;;) {
    int best = -1, best_deg = 0;
    for (int j = 0; j < s.n; ++j) {
      if (!live[static_cast<std::size_t>(j)]) continue;
      int deg = 0;
      for (int k = 0; k < s.n; ++k) deg += live[static_cast<std::size_t>(k)] && s.edge(j, k) != 0.0 ? 1 : 0;
      if (best < 0 || deg < best_deg) {
        best = j;
        best_deg = deg;
      }
    }
    if (best < 0) break;
    sol.items.push_back(best);
    live[static_cast<std::size_t>(best)] = 0;
    for (int k = 0; k < s.n; ++k)
      if (s.edge(best, k) != 0.0) live[static_cast<std::size_t>(k)] = 0;
  }
  std::sort(sol.items.begin(), sol.items.end());
  return sol;
}

Solution earliest_finish(const Instance& s, bool precedence) {
  const int ops = s.data->jobs * s.data->machines;
  std::vector<double> job(static_cast<std::size_t>(s.data->jobs), 0.0), machine(static_cast<std::size_t>(s.data->machines), 0.0);
  std::vector<char> done(static_cast<std::size_t>(ops), 0);
  std::vector<int> order;
  for (int k = 0; k < ops; ++k) {
    int best = -1;
    double best_end = 0.0;
    for (int o = 0; o < ops; ++o) {
      if (done[static_cast<std::size_t>(o)]) continue;
      if (precedence && s.attr(o, 1) > 0.0 && !done[static_cast<std::size_t>(o - 1)]) continue;
      const double end = std::max(job[static_cast<std::size_t>(s.attr(o, 0))], machine[static_cast<std::size_t>(s.attr(o, 2))]) +
                         s.attr(o, 3);
      if (best < 0 || end < best_end) {
        best = o;
        best_end = end;
      }
    }
    done[static_cast<std::size_t>(best)] = 1;
    job[static_cast<std::size_t>(s.attr(best, 0))] = machine[static_cast<std::size_t>(s.attr(best, 2))] = best_end;
    order.push_back(best);
  }
  Solution sol;
  sol.finish = detail::shop_finish(s, order);
  return sol;
}

Solution least_loaded(const Instance& s) {
  const int jobs = s.data->jobs, m = s.data->machines;
  std::vector<double> load(static_cast<std::size_t>(m), 0.0);
  Solution sol;
  sol.assignment.assign(static_cast<std::size_t>(jobs), 0);
  for (int j : umsp_job_order(s)) {
    int best = 0;
    for (int q = 1; q < m; ++q)
      if (load[static_cast<std::size_t>(q)] + s.edge(j, jobs + q) < load[static_cast<std::size_t>(best)] + s.edge(j, jobs + best)) best = q;
    load[static_cast<std::size_t>(best)] += s.edge(j, jobs + best);
    sol.assignment[static_cast<std::size_t>(j)] = best;
  }
  return sol;
}

}  // namespace

Solution solve_heuristic(const Instance& s) {
  detail::require_initial(s);
  const auto& t = s.task;
  Solution sol;
  if (t == "atsp") {
    Route r = nearest_neighbour(s);
    two_opt(r, [&](const Route& x) { return closed_length(s, x); });
    sol.routes.push_back(r);
  } else if (t == "trp") {
    Route r = nearest_neighbour(s);
    two_opt(r, [&](const Route& x) { return latency(s, x); });
    sol.routes.push_back(r);
  } else if (t == "cvrp") sol = sweep(s);
  else if (t == "op") sol = orienteering_greedy(s);
  else if (t == "pctsp") sol = prize_greedy(s);
  else if (t == "kp") sol = density_greedy(s);
  else if (t == "mvc") sol = cover_greedy(s);
  else if (t == "mis") sol = independent_greedy(s);
  else if (t == "jssp" || t == "ossp") sol = earliest_finish(s, t == "jssp");
  else if (t == "umsp") sol = least_loaded(s);
  else throw UsageError("unknown task: " + t);
  sol.task = t;
  sol.optimal = false;
  sol.objective = solution_objective(s, sol);
  return sol;
}

}  // namespace gencop
