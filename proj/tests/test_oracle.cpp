#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "gencop/error.hpp"
#include "gencop/oracle.hpp"

using namespace gencop;

namespace {

// Best natural objective over every legal action sequence of the MDP.
double search_mdp(const Instance& s, double so_far) {
  const auto& spec = task_spec(s.task);
  if (is_terminal(s)) return objective_from_cost(spec, so_far);
  const auto mask = legal_mask(s);
  double best = spec.direction == Direction::minimize ? std::numeric_limits<double>::infinity()
                                                       : -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] != 0.0) continue;
    auto [next, c] = step(s, action_at(s, static_cast<int>(i)));
    const double v = search_mdp(next, so_far + c);
    best = spec.direction == Direction::minimize ? std::min(best, v) : std::max(best, v);
  }
  return best;
}

GenConfig cfg(const std::string& task, int n, int count = 1, std::uint64_t seed = 1) {
  GenConfig g;
  g.task = task;
  g.n = n;
  g.count = count;
  g.seed = seed;
  return g;
}

bool same_instance(const Instance& a, const Instance& b) {
  return a.data->attr == b.data->attr && a.data->edge == b.data->edge && a.data->id == b.data->id &&
         a.data->capacity == b.data->capacity && a.remaining == b.remaining;
}

}  // namespace

TEST_CASE("generator scaling rules") {
  CHECK(default_capacity("cvrp", 100) == 50.0);
  CHECK(default_capacity("cvrp", 200) == 80.0);
  CHECK(default_capacity("cvrp", 20) == 10.0);
  CHECK(default_capacity("cvrp", 50) == 25.0);
  CHECK(default_capacity("kp", 100) == 25.0);
  CHECK(default_capacity("kp", 20) == 5.0);
  CHECK(default_capacity("op", 100) == 4.0);
  CHECK(generate_one(cfg("kp", 20), 0).data->capacity == 5.0);
  CHECK_THROWS_AS(generate_one(cfg("sop", 10), 0), UsageError);
  CHECK_THROWS_AS(generate_one(cfg("atsp", 1), 0), UsageError);
}

TEST_CASE("generated instances follow their distributions") {
  for (const auto& inst : generate(cfg("cvrp", 20, 20))) {
    for (int j = 1; j < inst.n; ++j) {
      const double d = inst.attr(j, 2);
      CHECK(d == std::floor(d));
      CHECK(d >= 1.0);
      CHECK(d <= 10.0);
    }
  }
  for (const auto& inst : generate(cfg("atsp", 8, 20))) {
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j)
        for (int k = 0; k < 8; ++k) CHECK(inst.edge(i, j) <= inst.edge(i, k) + inst.edge(k, j));
  }
  for (const auto& inst : generate(cfg("kp", 30, 10))) {
    for (int j = 0; j < inst.n; ++j) CHECK(std::abs(inst.attr(j, 1) * 1e4 - std::round(inst.attr(j, 1) * 1e4)) < 1e-6);
  }
  // the 2/n clamp keeps small graphs from being empty on average
  GenConfig sparse = cfg("mis", 14, 400);
  sparse.edge_low = sparse.edge_high = 0.0;
  double edges = 0.0;
  for (const auto& inst : generate(sparse))
    for (int i = 0; i < 14; ++i)
      for (int j = i + 1; j < 14; ++j) edges += inst.edge(i, j);
  CHECK(edges / 400.0 == doctest::Approx(13.0).epsilon(0.1));
  for (const auto& inst : generate(cfg("op", 20, 5))) {
    for (int j = 1; j < inst.n; ++j) {
      CHECK(inst.attr(j, 2) > 0.0);
      CHECK(inst.attr(j, 2) <= 1.0);
    }
  }
}

TEST_CASE("generation is reproducible and independent of the worker count") {
  for (const auto& id : task_ids()) {
    CAPTURE(id);
    const auto a = generate(cfg(id, 6, 5, 42));
    setenv("GENCOP_WORKERS", "3", 1);
    const auto b = generate(cfg(id, 6, 5, 42));
    unsetenv("GENCOP_WORKERS");
    const auto c = generate(cfg(id, 6, 5, 43));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(same_instance(a[i], b[i]));
    CHECK_FALSE(same_instance(a[0], c[0]));
  }
}

TEST_CASE("exact solver examples") {
  const auto square = make_euclidean("atsp", {0, 0, 0, 1, 1, 1, 1, 0}, {}, 0, 0.0);
  CHECK(solve_exact(square).objective == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(solve_heuristic(square).objective == doctest::Approx(4.0).epsilon(1e-12));

  const auto kp = make_kp({1, 2, 3}, {1, 2, 3}, 4.0);
  const auto ks = solve_exact(kp);
  CHECK(ks.objective == 4.0);
  CHECK(ks.items == std::vector<int>{0, 2});

  const auto mvc = solve_exact(make_graph("mvc", 3, {{0, 1}, {1, 2}}));
  CHECK(mvc.items == std::vector<int>{1});
  CHECK(mvc.objective == 1.0);
  const auto mis = solve_exact(make_graph("mis", 3, {{0, 1}, {1, 2}}));
  CHECK(mis.items == std::vector<int>{0, 2});
  CHECK(mis.objective == 2.0);
}

TEST_CASE("exact solvers agree with brute force") {
  for (int n = 4; n <= 9; ++n)
    for (const auto& inst : generate(cfg("atsp", n, 10, static_cast<std::uint64_t>(n))))
      CHECK(solve_exact(inst).objective == reference::atsp_permutations(inst));
  for (int n = 5; n <= 15; n += 5)
    for (const auto& inst : generate(cfg("kp", n, 10, static_cast<std::uint64_t>(n))))
      CHECK(solve_exact(inst).objective == reference::kp_subsets(inst));
  for (int n = 4; n <= 12; n += 4)
    for (const auto& inst : generate(cfg("mis", n, 10, static_cast<std::uint64_t>(n))))
      CHECK(solve_exact(inst).objective == static_cast<double>(reference::mis_exhaustive(inst)));
}

TEST_CASE("exact solvers match exhaustive search over the MDP") {
  const std::vector<std::pair<std::string, int>> sizes = {{"atsp", 6}, {"trp", 6}, {"cvrp", 6}, {"op", 7},
                                                          {"pctsp", 6}, {"kp", 7}, {"mvc", 7},  {"mis", 7},
                                                          {"jssp", 2}, {"ossp", 2}, {"umsp", 5}};
  for (const auto& [id, n] : sizes) {
    CAPTURE(id);
    GenConfig g = cfg(id, n, 4, 9);
    if (id == "cvrp") g.capacity = 12.0;
    if (id == "op") g.capacity = 1.5;
    for (const auto& inst : generate(g)) {
      const auto sol = solve_exact(inst);
      CHECK(sol.optimal);
      CHECK(sol.objective == doctest::Approx(search_mdp(inst, 0.0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("every solution replays to its objective and heuristics never beat exact") {
  for (const auto& id : task_ids()) {
    CAPTURE(id);
    const int n = id == "jssp" || id == "ossp" ? 3 : id == "cvrp" || id == "umsp" ? 8 : 10;
    for (const auto& inst : generate(cfg(id, n, 20, 5))) {
      const auto ex = solve_exact(inst);
      const auto he = solve_heuristic(inst);
      CHECK_FALSE(he.optimal);
      CHECK(solution_objective(inst, ex) == ex.objective);
      const auto te = trajectory_from_solution(inst, ex);
      const auto th = trajectory_from_solution(inst, he);
      CHECK(te.objective == ex.objective);
      CHECK(th.objective == he.objective);
      CHECK_FALSE(better(task_spec(id), he.objective, ex.objective));
    }
  }
}

TEST_CASE("heuristics hold up on random atsp with ten nodes") {
  double total = 0.0;
  for (const auto& inst : generate(cfg("atsp", 10, 30, 8))) {
    const double opt = solve_exact(inst).objective;
    const double h = solve_heuristic(inst).objective;
    CHECK(h >= opt);
    total += gap(task_spec("atsp"), h, opt);
  }
  CHECK(total / 30 < 0.2);
}

TEST_CASE("limits route large instances to the heuristic") {
  const auto big = generate_one(cfg("mvc", 200), 0);
  CHECK_FALSE(within_exact_limit(big));
  CHECK_THROWS_AS(solve_exact(big), UsageError);
  const auto sol = solve(big);
  CHECK_FALSE(sol.optimal);
  CHECK_NOTHROW(trajectory_from_solution(big, sol));
  for (const auto& id : {"atsp", "trp", "cvrp", "op", "pctsp", "kp"}) {
    const auto inst = generate_one(cfg(id, 40), 0);
    CHECK_NOTHROW(trajectory_from_solution(inst, solve(inst)));
  }
}

TEST_CASE("cvrp trajectories order subtours by final remaining capacity") {
  // depot, then customers with demands 2, 1, 4, 4
  const auto inst = make_euclidean("cvrp", {0, 0, 1, 0, 1, 1, -1, 0, -1, -1}, {0, 2, 1, 4, 4}, 1, 10.0);
  Solution sol;
  sol.task = "cvrp";
  sol.routes = {{3, 4}, {1, 2}};
  sol.objective = solution_objective(inst, sol);
  const auto traj = trajectory_from_solution(inst, sol);
  REQUIRE(traj.actions.size() == 4);
  CHECK(traj.actions[0] == Action{1, 0});
  CHECK(traj.actions[1] == Action{2, 0});
  CHECK(traj.actions[2] == Action{3, 1});
  CHECK(traj.actions[3] == Action{4, 0});

  // one vehicle: the tsp action sequence with capacity bookkeeping
  const auto small = make_euclidean("cvrp", {0, 0, 1, 0, 1, 1, 0, 1}, {0, 2, 3, 4}, 1, 10.0);
  Solution one;
  one.task = "cvrp";
  one.routes = {{1, 2, 3}};
  one.objective = solution_objective(small, one);
  const auto t1 = trajectory_from_solution(small, one);
  CHECK(t1.actions == std::vector<Action>{{1, 0}, {2, 0}, {3, 0}});
  CHECK(t1.objective == doctest::Approx(4.0).epsilon(1e-12));
  Instance end = small;
  for (const auto& a : t1.actions) end = step(end, a).first;
  CHECK(end.remaining == 1.0);
}

TEST_CASE("order-free targets follow the optimal set") {
  const auto kp = make_kp({0.1, 0.8, 0.7}, {0.5, 0.5, 0.5}, 1.0);
  const auto traj = trajectory_from_solution(kp, solve_exact(kp));
  CHECK_FALSE(traj.ordered);
  CHECK(suffix_state(traj, 0).targets == std::vector<int>{1, 2});
  const auto after = suffix_state(traj, 1);
  CHECK(after.targets == std::vector<int>{flat_index(after.state, {2, 0})});
}

TEST_CASE("replay mismatch is rejected") {
  const auto kp = make_kp({1, 2, 3}, {1, 2, 3}, 4.0);
  auto sol = solve_exact(kp);
  sol.objective += 1.0;
  CHECK_THROWS_AS(trajectory_from_solution(kp, sol), DataError);
}
