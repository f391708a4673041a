#pragma once

#include <memory>
#include <string>
#include <vector>

namespace gencop {

// Per-instance data that never changes along a trajectory.
//   routing (atsp, trp, cvrp, op, pctsp): edge = distances (1 channel),
//     attr = [x, y, demand | prize | prize, penalty] (atsp has no attributes);
//     node 0 is the depot / start.
//   kp: attr = [value, weight]. mvc, mis: edge = adjacency.
//   jssp, ossp: op nodes first (attr = [job, position, machine, duration]),
//     then machine nodes (attr = [machine, 0, 0, 0]).
//   umsp: job nodes, then machine nodes; edge[j][m] = edge[m][j] = duration.
struct StaticData {
  int attr_cols = 0;
  std::vector<double> attr;  // n x attr_cols
  int edge_cols = 0;
  std::vector<double> edge;  // n x n x edge_cols
  std::vector<int> type;     // node type per node
  std::vector<double> id;    // random identifier in [0, 1)
  int jobs = 0;
  int machines = 0;
  double capacity = 0.0;     // cvrp Q, kp capacity, op budget, pctsp prize requirement
};

// A BQ-MDP state: the tail instance left after some construction steps.
// Copies share the static data.
struct Instance {
  std::string task;
  int n = 0;
  std::shared_ptr<const StaticData> data;
  std::vector<char> alive;
  int origin = -1;
  int destination = -1;
  double remaining = 0.0;  // capacity / budget / prize requirement left
  double makespan = 0.0;
  std::vector<double> job_ready;
  std::vector<double> machine_ready;  // machine loads for umsp
  bool done = false;                  // explicit termination (op, pctsp)

  double attr(int node, int col) const { return data->attr[static_cast<std::size_t>(node * data->attr_cols + col)]; }
  double edge(int from, int to, int ch = 0) const {
    return data->edge[(static_cast<std::size_t>(from) * static_cast<std::size_t>(n) + static_cast<std::size_t>(to)) *
                          static_cast<std::size_t>(data->edge_cols) +
                      static_cast<std::size_t>(ch)];
  }
  int type(int node) const { return data->type[static_cast<std::size_t>(node)]; }
  bool live(int node) const { return alive[static_cast<std::size_t>(node)] != 0; }
  int live_count() const;
};

struct Action {
  int node = 0;
  int option = 0;
  bool operator==(const Action&) const = default;
};

// Expert or policy solution as an action sequence. For order-free tasks the
// actions form a set and `ordered` is false.
struct Trajectory {
  Instance initial;
  std::vector<Action> actions;
  double objective = 0.0;
  bool ordered = true;
};

}  // namespace gencop
