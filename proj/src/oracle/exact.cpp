#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "gencop/error.hpp"
#include "oracle_common.hpp"

namespace gencop {
namespace {

using detail::dist;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest open paths 0 -> ... -> j over customer subsets (customer c is
// node c + 1). parent holds the previous customer or -1.
struct PathTable {
  int m = 0;
  std::vector<double> len;  // (1 << m) x m
  std::vector<int> parent;
  double at(unsigned mask, int j) const { return len[static_cast<std::size_t>(mask) * m + j]; }

  std::vector<int> path(unsigned mask, int j) const {
    std::vector<int> out;
    while (j >= 0) {
      out.push_back(j + 1);
      const int p = parent[static_cast<std::size_t>(mask) * m + j];
      mask &= ~(1u << j);
      j = p;
    }
    std::reverse(out.begin(), out.end());
    return out;
  }
};

// weight(k): multiplier of the k-th leg (k = customers already visited).
template <typename W>
PathTable shortest_paths(const Instance& s, W weight) {
  PathTable t;
  t.m = s.n - 1;
  const std::size_t states = std::size_t{1} << t.m;
  t.len.assign(states * t.m, kInf);
  t.parent.assign(states * t.m, -1);
  for (int j = 0; j < t.m; ++j) t.len[(std::size_t{1} << j) * t.m + j] = weight(0) * dist(s, 0, j + 1);
  for (std::size_t mask = 1; mask < states; ++mask) {
    const double w = weight(std::popcount(mask));
    for (int i = 0; i < t.m; ++i) {
      const double base = t.len[mask * t.m + i];
      if (!(mask >> i & 1u) || base == kInf) continue;
      for (int j = 0; j < t.m; ++j) {
        if (mask >> j & 1u) continue;
        const std::size_t next = mask | (std::size_t{1} << j);
        const double c = base + w * dist(s, i + 1, j + 1);
        if (c < t.len[next * t.m + j]) {
          t.len[next * t.m + j] = c;
          t.parent[next * t.m + j] = i;
        }
      }
    }
  }
  return t;
}

// Best closed tour over `mask`: (length, last customer).
std::pair<double, int> close_tour(const Instance& s, const PathTable& t, unsigned mask) {
  if (mask == 0) return {0.0, -1};
  double best = kInf;
  int last = -1;
  for (int j = 0; j < t.m; ++j) {
    if (!(mask >> j & 1u)) continue;
    const double c = t.at(mask, j) + dist(s, j + 1, 0);
    if (c < best) {
      best = c;
      last = j;
    }
  }
  return {best, last};
}

Solution routing_tour(const Instance& s) {
  Solution sol;
  const auto t = shortest_paths(s, [](int) { return 1.0; });
  const unsigned full = (1u << t.m) - 1u;
  auto [len, last] = close_tour(s, t, full);
  sol.routes.push_back(last < 0 ? std::vector<int>{} : t.path(full, last));
  return sol;
}

Solution repairman(const Instance& s) {
  Solution sol;
  const int m = s.n - 1;
  const auto t = shortest_paths(s, [m](int k) { return static_cast<double>(m - k); });
  const unsigned full = (1u << t.m) - 1u;
  double best = kInf;
  int last = -1;
  for (int j = 0; j < t.m; ++j)
    if (t.at(full, j) < best) {
      best = t.at(full, j);
      last = j;
    }
  sol.routes.push_back(t.path(full, last));
  return sol;
}

Solution orienteering(const Instance& s) {
  const auto t = shortest_paths(s, [](int) { return 1.0; });
  double best_prize = -1.0, best_len = kInf;
  unsigned best_mask = 0;
  int best_last = -1;
  for (unsigned mask = 0; mask < (1u << t.m); ++mask) {
    auto [len, last] = close_tour(s, t, mask);
    if (len > s.data->capacity) continue;
    double prize = 0.0;
    for (int j = 0; j < t.m; ++j)
      if (mask >> j & 1u) prize += s.attr(j + 1, 2);
    if (prize > best_prize || (prize == best_prize && len < best_len)) {
      best_prize = prize;
      best_len = len;
      best_mask = mask;
      best_last = last;
    }
  }
  Solution sol;
  sol.routes.push_back(best_last < 0 ? std::vector<int>{} : t.path(best_mask, best_last));
  return sol;
}

Solution prize_collecting(const Instance& s) {
  const auto t = shortest_paths(s, [](int) { return 1.0; });
  double best = kInf;
  unsigned best_mask = 0;
  int best_last = -1;
  for (unsigned mask = 0; mask < (1u << t.m); ++mask) {
    double prize = 0.0, penalty = 0.0;
    for (int j = 0; j < t.m; ++j) {
      if (mask >> j & 1u)
        prize += s.attr(j + 1, 2);
      else
        penalty += s.attr(j + 1, 3);
    }
    if (s.data->capacity - prize > 0.5 * detail::kTol) continue;
    auto [len, last] = close_tour(s, t, mask);
    if (len + penalty < best) {
      best = len + penalty;
      best_mask = mask;
      best_last = last;
    }
  }
  Solution sol;
  sol.routes.push_back(best_last < 0 ? std::vector<int>{} : t.path(best_mask, best_last));
  return sol;
}

Solution vehicle_routing(const Instance& s) {
  const auto t = shortest_paths(s, [](int) { return 1.0; });
  const unsigned states = 1u << t.m;
  std::vector<double> route(states, kInf);
  std::vector<int> route_last(states, -1);
  for (unsigned mask = 1; mask < states; ++mask) {
    double demand = 0.0;
    for (int j = 0; j < t.m; ++j)
      if (mask >> j & 1u) demand += s.attr(j + 1, 2);
    if (demand > s.data->capacity + detail::kTol) continue;
    std::tie(route[mask], route_last[mask]) = close_tour(s, t, mask);
  }
  std::vector<double> part(states, kInf);
  std::vector<unsigned> choice(states, 0);
  part[0] = 0.0;
  for (unsigned mask = 1; mask < states; ++mask) {
    const unsigned low = mask & (~mask + 1u);
    const unsigned rest = mask & ~low;
    for (unsigned sub = rest;; sub = (sub - 1u) & rest) {
      const unsigned r = sub | low;
      if (route[r] < kInf && part[mask & ~r] + route[r] < part[mask]) {
        part[mask] = part[mask & ~r] + route[r];
        choice[mask] = r;
      }
      if (sub == 0) break;
    }
  }
  Solution sol;
  for (unsigned mask = states - 1u; mask != 0; mask &= ~choice[mask]) {
    sol.routes.push_back(t.path(choice[mask], route_last[choice[mask]]));
  }
  return sol;
}

Solution knapsack(const Instance& s) {
  const int n = s.n;
  const auto cap = static_cast<std::int64_t>(std::floor(s.data->capacity * 1e4 + 1e-6));
  std::vector<std::int64_t> w(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    w[static_cast<std::size_t>(j)] = std::llround(s.attr(j, 1) * 1e4);
    if (std::abs(static_cast<double>(w[static_cast<std::size_t>(j)]) - s.attr(j, 1) * 1e4) > 1e-6) {
      throw DataError("knapsack oracle: weight " + std::to_string(s.attr(j, 1)) + " is off the 1e-4 grid");
    }
  }
  const auto width = static_cast<std::size_t>(cap + 1);
  std::vector<double> best(width, 0.0);
  const std::size_t words = (width + 63) / 64;
  std::vector<std::uint64_t> take(static_cast<std::size_t>(n) * words, 0);
  for (int j = 0; j < n; ++j) {
    const auto wj = w[static_cast<std::size_t>(j)];
    const double vj = s.attr(j, 0);
    for (std::int64_t c = cap; c >= wj; --c) {
      const double cand = best[static_cast<std::size_t>(c - wj)] + vj;
      if (cand > best[static_cast<std::size_t>(c)]) {
        best[static_cast<std::size_t>(c)] = cand;
        take[static_cast<std::size_t>(j) * words + static_cast<std::size_t>(c) / 64] |= std::uint64_t{1} << (c % 64);
      }
    }
  }
  Solution sol;
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);
  std::int64_t c = cap;
  for (int j = n - 1; j >= 0; --j) {
    if (take[static_cast<std::size_t>(j) * words + static_cast<std::size_t>(c) / 64] >> (c % 64) & 1u) {
      chosen[static_cast<std::size_t>(j)] = 1;
      c -= w[static_cast<std::size_t>(j)];
    }
  }
  // zero-value items that still fit keep the final state terminal
  for (int j = 0; j < n; ++j)
    if (!chosen[static_cast<std::size_t>(j)] && w[static_cast<std::size_t>(j)] <= c) {
      chosen[static_cast<std::size_t>(j)] = 1;
      c -= w[static_cast<std::size_t>(j)];
    }
  for (int j = 0; j < n; ++j)
    if (chosen[static_cast<std::size_t>(j)]) sol.items.push_back(j);
  return sol;
}

// Minimum vertex cover by subset enumeration.
std::uint32_t min_cover(const Instance& s) {
  const auto edges = detail::edge_list(s);
  std::uint32_t best = (1u << s.n) - 1u;
  for (std::uint32_t mask = 0; mask < (1u << s.n); ++mask) {
    if (std::popcount(mask) >= std::popcount(best)) continue;
    bool ok = true;
    for (auto [a, b] : edges)
      if (!(mask >> a & 1u) && !(mask >> b & 1u)) {
        ok = false;
        break;
      }
    if (ok) best = mask;
  }
  return best;
}

// Dispatch-order search over the shop's append-only schedules.
struct ShopSearch {
  const Instance& s;
  int ops, jobs, machines;
  bool precedence;
  std::vector<double> job_ready, machine_ready, job_left, machine_left;
  std::vector<char> done;
  std::vector<int> order, best_order;
  double best = kInf;

  ShopSearch(const Instance& inst, bool prec)
      : s(inst), jobs(inst.data->jobs), machines(inst.data->machines), precedence(prec) {
    ops = jobs * machines;
    job_ready.assign(static_cast<std::size_t>(jobs), 0.0);
    machine_ready.assign(static_cast<std::size_t>(machines), 0.0);
    job_left.assign(static_cast<std::size_t>(jobs), 0.0);
    machine_left.assign(static_cast<std::size_t>(machines), 0.0);
    done.assign(static_cast<std::size_t>(ops), 0);
    for (int o = 0; o < ops; ++o) {
      job_left[static_cast<std::size_t>(s.attr(o, 0))] += s.attr(o, 3);
      machine_left[static_cast<std::size_t>(s.attr(o, 2))] += s.attr(o, 3);
    }
  }

  double bound(double makespan) const {
    double b = makespan;
    for (int j = 0; j < jobs; ++j) b = std::max(b, job_ready[static_cast<std::size_t>(j)] + job_left[static_cast<std::size_t>(j)]);
    for (int m = 0; m < machines; ++m) {
      b = std::max(b, machine_ready[static_cast<std::size_t>(m)] + machine_left[static_cast<std::size_t>(m)]);
    }
    return b;
  }

  void run(double makespan) {
    if (static_cast<int>(order.size()) == ops) {
      if (makespan < best) {
        best = makespan;
        best_order = order;
      }
      return;
    }
    if (bound(makespan) >= best) return;
    for (int o = 0; o < ops; ++o) {
      if (done[static_cast<std::size_t>(o)]) continue;
      if (precedence && s.attr(o, 1) > 0.0 && !done[static_cast<std::size_t>(o - 1)]) continue;
      const auto j = static_cast<std::size_t>(s.attr(o, 0));
      const auto m = static_cast<std::size_t>(s.attr(o, 2));
      const double d = s.attr(o, 3);
      const double jr = job_ready[j], mr = machine_ready[m];
      const double end = std::max(jr, mr) + d;
      job_ready[j] = machine_ready[m] = end;
      job_left[j] -= d;
      machine_left[m] -= d;
      done[static_cast<std::size_t>(o)] = 1;
      order.push_back(o);
      run(std::max(makespan, end));
      order.pop_back();
      done[static_cast<std::size_t>(o)] = 0;
      job_left[j] += d;
      machine_left[m] += d;
      job_ready[j] = jr;
      machine_ready[m] = mr;
    }
  }
};

Solution shop(const Instance& s, bool precedence) {
  ShopSearch search(s, precedence);
  search.run(0.0);
  Solution sol;
  sol.finish = detail::shop_finish(s, search.best_order);
  return sol;
}

Solution machines(const Instance& s) {
  const auto order = umsp_job_order(s);
  const int jobs = s.data->jobs, m = s.data->machines;
  std::vector<double> load(static_cast<std::size_t>(m), 0.0);
  std::vector<int> assign(static_cast<std::size_t>(jobs), 0), best_assign;
  double best = kInf;
  auto rec = [&](auto&& self, std::size_t k, double makespan) -> void {
    if (makespan >= best) return;
    if (k == order.size()) {
      best = makespan;
      best_assign = assign;
      return;
    }
    const int job = order[k];
    for (int q = 0; q < m; ++q) {
      const double d = s.edge(job, jobs + q);
      load[static_cast<std::size_t>(q)] += d;
      assign[static_cast<std::size_t>(job)] = q;
      self(self, k + 1, std::max(makespan, load[static_cast<std::size_t>(q)]));
      load[static_cast<std::size_t>(q)] -= d;
    }
  };
  rec(rec, 0, 0.0);
  Solution sol;
  sol.assignment = best_assign;
  return sol;
}

}  // namespace

bool within_exact_limit(const Instance& s) {
  const auto& t = s.task;
  if (t == "atsp") return s.n <= 14;
  if (t == "trp") return s.n <= 12;
  if (t == "cvrp") return s.n <= 8;
  if (t == "op" || t == "pctsp") return s.n <= 10;
  if (t == "kp") return s.n <= 200;
  if (t == "mvc" || t == "mis") return s.n <= 16;
  if (t == "jssp" || t == "ossp") return s.data->jobs <= 3 && s.data->machines <= 3;
  if (t == "umsp") return s.data->jobs <= 8;
  throw UsageError("unknown task: " + t);
}

Solution solve_exact(const Instance& s) {
  detail::require_initial(s);
  if (!within_exact_limit(s)) {
    throw UsageError("solve_exact: " + s.task + " instance with " + std::to_string(s.n) +
                     " nodes is over the exact limit; use solve_heuristic");
  }
  const auto& t = s.task;
  Solution sol;
  if (t == "atsp") sol = routing_tour(s);
  else if (t == "trp") sol = repairman(s);
  else if (t == "cvrp") sol = vehicle_routing(s);
  else if (t == "op") sol = orienteering(s);
  else if (t == "pctsp") sol = prize_collecting(s);
  else if (t == "kp") sol = knapsack(s);
  else if (t == "mvc" || t == "mis") {
    const auto cover = min_cover(s);
    for (int j = 0; j < s.n; ++j)
      if (((cover >> j) & 1u) == (t == "mvc" ? 1u : 0u)) sol.items.push_back(j);
  } else if (t == "jssp" || t == "ossp") sol = shop(s, t == "jssp");
  else sol = machines(s);
  sol.task = t;
  sol.optimal = true;
  sol.objective = solution_objective(s, sol);
  return sol;
}

Solution solve(const Instance& s) { return within_exact_limit(s) ? solve_exact(s) : solve_heuristic(s); }

}  // namespace gencop
