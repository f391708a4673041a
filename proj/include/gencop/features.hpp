#pragma once

#include <vector>

namespace gencop {

// Feature rows of one node type. `nodes` maps each row back to the node index
// of the originating Instance.
struct TypeBlock {
  std::vector<int> nodes;
  int cols = 0;
  std::vector<double> values;  // nodes.size() x cols

  int rows() const { return static_cast<int>(nodes.size()); }
};

// Edge features of one attended pair, laid out (key = source node, query =
// target node, channel).
struct PairBlock {
  int channels = 0;
  std::vector<double> values;  // rows(source) x rows(target) x channels
};

// Everything the network sees for one state: live nodes only, instance-level
// features already replicated onto node rows.
struct ModelInput {
  std::vector<TypeBlock> types;
  std::vector<PairBlock> pairs;  // aligned with TaskSpec::graph.pairs
  int action_type = 0;
  int options = 1;
  std::vector<double> mask;  // rows(action_type) x options, entries 0 or -inf
};

// Distribution over the actions of a ModelInput.
struct PolicyOutput {
  std::vector<int> nodes;  // instance node per row
  int options = 1;
  std::vector<double> logits;
  std::vector<double> probs;
};

}  // namespace gencop
