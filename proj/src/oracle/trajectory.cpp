#include <algorithm>
#include <cmath>
#include <numeric>

#include "gencop/error.hpp"
#include "oracle_common.hpp"

namespace gencop {

namespace detail {

std::vector<std::pair<int, int>> edge_list(const Instance& s) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < s.n; ++i)
    for (int j = i + 1; j < s.n; ++j)
      if (s.edge(i, j) != 0.0) out.emplace_back(i, j);
  return out;
}

std::vector<double> shop_finish(const Instance& s, const std::vector<int>& order) {
  std::vector<double> job(static_cast<std::size_t>(s.data->jobs), 0.0), machine(static_cast<std::size_t>(s.data->machines), 0.0);
  std::vector<double> finish(static_cast<std::size_t>(s.data->jobs * s.data->machines), 0.0);
  for (int o : order) {
    const auto j = static_cast<std::size_t>(s.attr(o, 0));
    const auto m = static_cast<std::size_t>(s.attr(o, 2));
    const double end = std::max(job[j], machine[m]) + s.attr(o, 3);
    job[j] = machine[m] = end;
    finish[static_cast<std::size_t>(o)] = end;
  }
  return finish;
}

void require_initial(const Instance& s) {
  if (s.live_count() != s.n || s.done || s.makespan != 0.0 || (s.destination >= 0 && s.origin != 0) ||
      (s.task == "trp" && s.origin != 0)) {
    throw UsageError("oracle: " + s.task + " solvers take freshly generated instances");
  }
}

}  // namespace detail

std::vector<int> umsp_job_order(const Instance& s) {
  const int jobs = s.data->jobs;
  std::vector<double> key(static_cast<std::size_t>(jobs));
  for (int j = 0; j < jobs; ++j) {
    double mn = s.edge(j, jobs);
    for (int m = 1; m < s.data->machines; ++m) mn = std::min(mn, s.edge(j, jobs + m));
    key[static_cast<std::size_t>(j)] = mn;
  }
  std::vector<int> order(static_cast<std::size_t>(jobs));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return key[static_cast<std::size_t>(a)] > key[static_cast<std::size_t>(b)]; });
  return order;
}

double solution_objective(const Instance& s, const Solution& sol) {
  const auto& t = s.task;
  using detail::dist;
  if (t == "atsp" || t == "cvrp" || t == "pctsp") {
    double total = 0.0;
    std::vector<char> seen(static_cast<std::size_t>(s.n), 0);
    for (const auto& r : sol.routes) {
      if (r.empty()) continue;
      int prev = 0;
      for (int j : r) {
        total += dist(s, prev, j);
        seen[static_cast<std::size_t>(j)] = 1;
        prev = j;
      }
      total += dist(s, prev, 0);
    }
    if (t == "pctsp")
      for (int j = 1; j < s.n; ++j)
        if (!seen[static_cast<std::size_t>(j)]) total += s.attr(j, 3);
    return total;
  }
  if (t == "trp") {
    const auto& r = sol.routes.at(0);
    double total = 0.0;
    int prev = 0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      total += static_cast<double>(r.size() - k) * dist(s, prev, r[k]);
      prev = r[k];
    }
    return total;
  }
  if (t == "op") {
    double total = 0.0;
    for (int j : sol.routes.at(0)) total += s.attr(j, 2);
    return total;
  }
  if (t == "kp") {
    double total = 0.0;
    for (int j : sol.items) total += s.attr(j, 0);
    return total;
  }
  if (t == "mvc" || t == "mis") return static_cast<double>(sol.items.size());
  if (t == "jssp" || t == "ossp") {
    double mk = 0.0;
    for (double f : sol.finish) mk = std::max(mk, f);
    return mk;
  }
  if (t == "umsp") {
    std::vector<double> load(static_cast<std::size_t>(s.data->machines), 0.0);
    for (int j = 0; j < s.data->jobs; ++j) {
      const int m = sol.assignment.at(static_cast<std::size_t>(j));
      load[static_cast<std::size_t>(m)] += s.edge(j, s.data->jobs + m);
    }
    return *std::max_element(load.begin(), load.end());
  }
  throw UsageError("unknown task: " + t);
}

Trajectory trajectory_from_solution(const Instance& s, const Solution& sol) {
  const auto& t = s.task;
  const auto& spec = task_spec(t);
  Trajectory traj;
  traj.initial = s;
  traj.objective = sol.objective;
  traj.ordered = spec.loss == LossMode::single_class;
  auto& acts = traj.actions;
  if (t == "atsp" || t == "trp") {
    for (int j : sol.routes.at(0)) acts.push_back({j, 0});
  } else if (t == "op" || t == "pctsp") {
    for (int j : sol.routes.at(0)) acts.push_back({j, 0});
    acts.push_back({0, 0});
  } else if (t == "cvrp") {
    std::vector<std::pair<double, const std::vector<int>*>> routes;
    for (const auto& r : sol.routes) {
      if (r.empty()) continue;
      double load = 0.0;
      for (int j : r) load += s.attr(j, 2);
      routes.emplace_back(s.data->capacity - load, &r);
    }
    std::stable_sort(routes.begin(), routes.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; k < routes.size(); ++k) {
      const auto& r = *routes[k].second;
      for (std::size_t i = 0; i < r.size(); ++i) acts.push_back({r[i], k > 0 && i == 0 ? 1 : 0});
    }
  } else if (t == "kp" || t == "mvc" || t == "mis") {
    for (int j : sol.items) acts.push_back({j, 0});
  } else if (t == "jssp" || t == "ossp") {
    std::vector<int> ops(sol.finish.size());
    std::iota(ops.begin(), ops.end(), 0);
    std::stable_sort(ops.begin(), ops.end(), [&](int a, int b) {
      return sol.finish[static_cast<std::size_t>(a)] < sol.finish[static_cast<std::size_t>(b)];
    });
    for (int o : ops) acts.push_back({o, 0});
  } else if (t == "umsp") {
    for (int j : umsp_job_order(s)) acts.push_back({s.data->jobs + sol.assignment.at(static_cast<std::size_t>(j)), 0});
  } else {
    throw UsageError("unknown task: " + t);
  }
  const double replayed = objective_from_cost(spec, replay_cost(traj));
  if (std::abs(replayed - sol.objective) > 1e-9) {
    throw DataError("trajectory_from_solution: " + t + " replay gives " + std::to_string(replayed) +
                    " but the solver reported " + std::to_string(sol.objective));
  }
  return traj;
}

}  // namespace gencop
