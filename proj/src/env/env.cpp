#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "gencop/error.hpp"
#include "gencop/rng.hpp"
#include "rules.hpp"

namespace gencop {

int Instance::live_count() const {
  int c = 0;
  for (char a : alive) c += a ? 1 : 0;
  return c;
}

namespace {

const std::map<std::string, std::unique_ptr<Environment>>& registry() {
  static const auto reg = [] {
    std::map<std::string, std::unique_ptr<Environment>> m;
    for (auto* make : {detail::make_atsp, detail::make_trp, detail::make_cvrp, detail::make_op, detail::make_pctsp,
                       detail::make_kp, detail::make_mvc, detail::make_mis, detail::make_jssp, detail::make_ossp,
                       detail::make_umsp}) {
      auto env = make();
      const auto id = env->spec().id;
      m.emplace(id, std::move(env));
    }
    return m;
  }();
  return reg;
}

std::string mask_snapshot(const Instance& s) {
  const auto nodes = action_nodes(s);
  const int k = environment(s.task).spec().options;
  std::ostringstream os;
  os << "legal actions:";
  for (int node : nodes)
    for (int o = 0; o < k; ++o)
      if (environment(s.task).legal(s, {node, o})) os << " (" << node << "," << o << ")";
  return os.str();
}

}  // namespace

const Environment& environment(const std::string& task) {
  auto it = registry().find(task);
  if (it == registry().end()) throw UsageError("unknown task: " + task);
  return *it->second;
}

const TaskSpec& task_spec(const std::string& task) { return environment(task).spec(); }

std::vector<std::string> task_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, env] : registry()) ids.push_back(id);
  return ids;
}

std::vector<int> action_nodes(const Instance& s) {
  const int t = task_spec(s.task).action_type;
  std::vector<int> out;
  for (int j = 0; j < s.n; ++j)
    if (s.live(j) && s.type(j) == t) out.push_back(j);
  return out;
}

int flat_index(const Instance& s, Action a) {
  const auto nodes = action_nodes(s);
  const int k = task_spec(s.task).options;
  for (std::size_t r = 0; r < nodes.size(); ++r)
    if (nodes[r] == a.node) return static_cast<int>(r) * k + a.option;
  throw DataError("action node " + std::to_string(a.node) + " is not live in this " + s.task + " state");
}

Action action_at(const Instance& s, int flat) {
  const auto nodes = action_nodes(s);
  const int k = task_spec(s.task).options;
  if (flat < 0 || flat >= static_cast<int>(nodes.size()) * k) throw DataError("action index out of range");
  return {nodes[static_cast<std::size_t>(flat / k)], flat % k};
}

bool is_terminal(const Instance& s) { return environment(s.task).terminal(s); }

std::vector<double> legal_mask(const Instance& s) {
  const auto& env = environment(s.task);
  if (env.terminal(s)) throw DataError("legal_mask: " + s.task + " state is terminal");
  const auto nodes = action_nodes(s);
  const int k = env.spec().options;
  std::vector<double> mask(nodes.size() * static_cast<std::size_t>(k), -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < nodes.size(); ++r)
    for (int o = 0; o < k; ++o)
      if (env.legal(s, {nodes[r], o})) mask[r * static_cast<std::size_t>(k) + static_cast<std::size_t>(o)] = 0.0;
  return mask;
}

ModelInput model_input(const Instance& s) {
  const auto& env = environment(s.task);
  const auto& spec = env.spec();
  ModelInput in;
  in.types.resize(spec.graph.types.size());
  for (std::size_t t = 0; t < in.types.size(); ++t) in.types[t].cols = spec.node_features[t];
  std::vector<double> row;
  for (int j = 0; j < s.n; ++j) {
    if (!s.live(j)) continue;
    auto& blk = in.types[static_cast<std::size_t>(s.type(j))];
    row.clear();
    env.node_features(s, j, row);
    if (static_cast<int>(row.size()) != blk.cols) throw ShapeError("model_input: feature width mismatch in " + s.task);
    blk.nodes.push_back(j);
    blk.values.insert(blk.values.end(), row.begin(), row.end());
  }
  for (std::size_t p = 0; p < spec.graph.pairs.size(); ++p) {
    const auto& pr = spec.graph.pairs[p];
    PairBlock pb;
    if (pr.edges) {
      pb.channels = spec.edge_features[p];
      const auto& src = in.types[static_cast<std::size_t>(pr.source)].nodes;
      const auto& tgt = in.types[static_cast<std::size_t>(pr.target)].nodes;
      pb.values.reserve(src.size() * tgt.size() * static_cast<std::size_t>(pb.channels));
      for (int m : src)
        for (int n : tgt) env.edge_features(s, static_cast<int>(p), m, n, pb.values);
      if (pb.values.size() != src.size() * tgt.size() * static_cast<std::size_t>(pb.channels)) {
        throw ShapeError("model_input: edge width mismatch in " + s.task);
      }
    }
    in.pairs.push_back(std::move(pb));
  }
  in.action_type = spec.action_type;
  in.options = spec.options;
  in.mask = legal_mask(s);
  return in;
}

std::pair<Instance, double> step(const Instance& s, Action a) {
  const auto& env = environment(s.task);
  if (env.terminal(s)) throw DataError("step: " + s.task + " state is terminal");
  if (!env.legal(s, a)) {
    throw DataError("step: illegal " + s.task + " action (" + std::to_string(a.node) + "," + std::to_string(a.option) +
                    "); " + mask_snapshot(s));
  }
  Instance next = s;
  const double cost = env.apply(next, a);
  return {std::move(next), cost};
}

double objective_from_cost(const TaskSpec& spec, double cost) {
  return spec.direction == Direction::minimize ? cost : -cost;
}

double gap(const TaskSpec& spec, double value, double reference) {
  const double diff = spec.direction == Direction::minimize ? value - reference : reference - value;
  if (diff == 0.0) return 0.0;
  return diff / std::max(std::abs(reference), 1e-12);
}

bool better(const TaskSpec& spec, double a, double b, double tol) {
  return spec.direction == Direction::minimize ? a < b - tol : a > b + tol;
}

Trajectory rollout(const Instance& start, const Policy& policy, Decode mode, std::uint64_t seed) {
  const auto& spec = task_spec(start.task);
  Trajectory traj;
  traj.initial = start;
  Instance s = start;
  Rng rng(seed);
  const std::size_t limit = static_cast<std::size_t>(start.n) * static_cast<std::size_t>(spec.options) * 2;
  double cost = 0.0;
  while (!is_terminal(s)) {
    if (traj.actions.size() >= limit) throw NumericalError("rollout: step limit exceeded on " + s.task);
    const ModelInput in = model_input(s);
    const PolicyOutput out = policy(s, in);
    if (out.probs.size() != in.mask.size()) throw ShapeError("rollout: policy output does not cover the mask");
    std::size_t pick = 0;
    if (mode == Decode::greedy) {
      for (std::size_t i = 1; i < out.probs.size(); ++i)
        if (out.probs[i] > out.probs[pick]) pick = i;
    } else {
      double u = rng.uniform(), acc = 0.0;
      pick = out.probs.size();
      std::size_t last = 0;
      for (std::size_t i = 0; i < out.probs.size(); ++i) {
        if (out.probs[i] <= 0.0) continue;
        last = i;
        acc += out.probs[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
      if (pick == out.probs.size()) pick = last;
    }
    const Action a = action_at(s, static_cast<int>(pick));
    auto [next, c] = step(s, a);
    cost += c;
    traj.actions.push_back(a);
    s = std::move(next);
  }
  traj.objective = objective_from_cost(spec, cost);
  traj.ordered = spec.loss == LossMode::single_class;
  return traj;
}

Suffix suffix_state(const Trajectory& traj, std::size_t t) {
  if (t >= traj.actions.size()) {
    throw UsageError("suffix_state: step " + std::to_string(t) + " out of range for a trajectory of length " +
                     std::to_string(traj.actions.size()));
  }
  Suffix out;
  out.state = traj.initial;
  for (std::size_t i = 0; i < t; ++i) out.state = step(out.state, traj.actions[i]).first;
  if (traj.ordered) {
    out.targets.push_back(flat_index(out.state, traj.actions[t]));
  } else {
    for (std::size_t i = t; i < traj.actions.size(); ++i) out.targets.push_back(flat_index(out.state, traj.actions[i]));
  }
  return out;
}

double replay_cost(const Trajectory& traj) {
  Instance s = traj.initial;
  double cost = 0.0;
  for (const auto& a : traj.actions) {
    auto [next, c] = step(s, a);
    cost += c;
    s = std::move(next);
  }
  if (!is_terminal(s)) throw DataError("replay: " + s.task + " trajectory ends in a non-terminal state");
  return cost;
}

}  // namespace gencop
