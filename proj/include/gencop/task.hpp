#pragma once

#include <string>
#include <vector>

namespace gencop {

enum class LossMode { single_class, multi_class };
enum class Direction { minimize, maximize };

// (target τ, source τ'): nodes of type τ attend to nodes of type τ'. Pairs
// without edge features run their block as vanilla attention.
struct AttendedPair {
  int target = 0;
  int source = 0;
  bool edges = false;
};

struct TypeGraphConfig {
  std::vector<std::string> types;
  std::vector<AttendedPair> pairs;  // application order within a layer
  std::vector<bool> feed_forward;   // per type

  int type_index(const std::string& name) const;

  static TypeGraphConfig single_type(bool edges);
  // ops <- ops mixed, ops <- machines mixed, machines <- machines vanilla,
  // machines <- ops mixed.
  static TypeGraphConfig job_shop();
  // jobs <- jobs vanilla, jobs <- machines mixed, machines <- machines
  // vanilla, machines <- jobs mixed.
  static TypeGraphConfig unrelated_machines();
};

// Static description of a task: feature widths per type and per attended
// pair, option count, loss mode and optimisation direction.
struct TaskSpec {
  std::string id;
  std::vector<int> node_features;  // F per node type
  std::vector<int> edge_features;  // F̄ per attended pair, 0 when absent
  int options = 1;                 // K
  LossMode loss = LossMode::single_class;
  Direction direction = Direction::minimize;
  TypeGraphConfig graph;
  int action_type = 0;

  int node_dim() const { return node_features.at(0); }
  int edge_dim() const { return edge_features.at(0); }
  bool multi_type() const { return graph.types.size() > 1; }
};

const char* to_string(LossMode m);
const char* to_string(Direction d);
LossMode loss_mode_from(const std::string& s);
Direction direction_from(const std::string& s);

}  // namespace gencop
