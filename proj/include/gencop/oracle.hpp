#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gencop/env.hpp"

namespace gencop {

// Generator settings. n counts every node, including the depot / start
// node of routing tasks; for shop tasks n is the job count.
struct GenConfig {
  std::string task;
  int n = 10;
  int count = 1;
  std::uint64_t seed = 0;
  int machines = 3;          // jssp, ossp, umsp
  double capacity = 0.0;     // <= 0: task default (cvrp Q, kp capacity, op budget, pctsp requirement)
  double edge_low = 0.05;    // Erdos-Renyi edge probability range
  double edge_high = 0.15;
};

// Task default for GenConfig::capacity at size n (pctsp: the requested prize).
double default_capacity(const std::string& task, int n);

Instance generate_one(const GenConfig& cfg, std::uint64_t index);
std::vector<Instance> generate(const GenConfig& cfg);

// Initial state over fixed static data. Hand-built instances use the
// helpers below; `ids` defaults to evenly spaced identifiers.
Instance initial_state(const std::string& task, std::shared_ptr<const StaticData> data);
Instance make_atsp(const std::vector<double>& dist, int n, std::vector<double> ids = {});
// xy holds n (x, y) pairs; extra holds n x extra_cols attributes appended
// after the coordinates (cvrp demand, op prize, pctsp prize + penalty).
Instance make_euclidean(const std::string& task, const std::vector<double>& xy, const std::vector<double>& extra,
                        int extra_cols, double capacity, std::vector<double> ids = {});
Instance make_kp(const std::vector<double>& values, const std::vector<double>& weights, double capacity,
                 std::vector<double> ids = {});
Instance make_graph(const std::string& task, int n, const std::vector<std::pair<int, int>>& edges,
                    std::vector<double> ids = {});
// order: jobs x machines machine index per operation; durations likewise.
Instance make_shop(const std::string& task, int jobs, int machines, const std::vector<int>& order,
                   const std::vector<double>& durations, std::vector<double> ids = {});
// durations: jobs x machines.
Instance make_umsp(int jobs, int machines, const std::vector<double>& durations, std::vector<double> ids = {});

struct Solution {
  std::string task;
  std::vector<std::vector<int>> routes;  // routing: customers in visiting order, one list per vehicle
  std::vector<int> items;                // kp, mvc, mis: chosen nodes
  std::vector<int> assignment;           // umsp: machine per job
  std::vector<double> finish;            // jssp, ossp: finish time per operation
  double objective = 0.0;                // natural objective
  bool optimal = false;
};

bool within_exact_limit(const Instance& s);
Solution solve_exact(const Instance& s);
Solution solve_heuristic(const Instance& s);
// Exact within the limits, heuristic above them.
Solution solve(const Instance& s);

// Natural objective recomputed from the solution structure.
double solution_objective(const Instance& s, const Solution& sol);

// Expert trajectory; replays it and rejects any objective mismatch.
Trajectory trajectory_from_solution(const Instance& s, const Solution& sol);

// Order in which the environment assigns umsp jobs.
std::vector<int> umsp_job_order(const Instance& s);

// Brute-force references for oracle tests.
namespace reference {
double atsp_permutations(const Instance& s);
double kp_subsets(const Instance& s);
int mis_exhaustive(const Instance& s);
}  // namespace reference

}  // namespace gencop
