#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gencop/features.hpp"
#include "gencop/instance.hpp"
#include "gencop/task.hpp"

namespace gencop {

// Task-specific rules of one BQ-MDP.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual const TaskSpec& spec() const = 0;
  virtual bool terminal(const Instance& s) const = 0;
  virtual bool legal(const Instance& s, Action a) const = 0;
  // Applies `a` in place and returns the step cost (minimisation form).
  virtual double apply(Instance& s, Action a) const = 0;
  virtual void node_features(const Instance& s, int node, std::vector<double>& out) const = 0;
  // Edge channels seen by a target node attending to a source node on pair `p`.
  virtual void edge_features(const Instance& s, int pair, int source, int target, std::vector<double>& out) const = 0;
};

const Environment& environment(const std::string& task);
const TaskSpec& task_spec(const std::string& task);
std::vector<std::string> task_ids();

// Live nodes of the acting type, in index order: the rows of the mask.
std::vector<int> action_nodes(const Instance& s);
int flat_index(const Instance& s, Action a);
Action action_at(const Instance& s, int flat);

bool is_terminal(const Instance& s);
// rows(action nodes) x K, entries 0 (legal) or -inf.
std::vector<double> legal_mask(const Instance& s);
ModelInput model_input(const Instance& s);
std::pair<Instance, double> step(const Instance& s, Action a);

// Natural objective from a sum of minimisation-form costs.
double objective_from_cost(const TaskSpec& spec, double cost);

// Sign-adjusted relative gap, lower is better.
double gap(const TaskSpec& spec, double value, double reference);
bool better(const TaskSpec& spec, double a, double b, double tol = 1e-9);

enum class Decode { greedy, sample };
using Policy = std::function<PolicyOutput(const Instance&, const ModelInput&)>;

Trajectory rollout(const Instance& start, const Policy& policy, Decode mode, std::uint64_t seed);

// State after the first t actions and the target flat indices at it.
struct Suffix {
  Instance state;
  std::vector<int> targets;
};
Suffix suffix_state(const Trajectory& traj, std::size_t t);

// Replays every action, checking legality; returns the summed cost.
double replay_cost(const Trajectory& traj);

}  // namespace gencop
