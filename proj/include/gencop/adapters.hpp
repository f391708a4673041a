#pragma once

#include <string>
#include <vector>

#include "gencop/features.hpp"
#include "gencop/multitype.hpp"
#include "gencop/rng.hpp"

namespace gencop {

struct CodebookConfig {
  int node_codes = 8;  // ℓ
  int edge_codes = 4;  // ℓ̄
  // Full-rank F x D adapters with no shared codebook (ablation switch).
  bool bypass = false;
  bool operator==(const CodebookConfig&) const = default;
};

// Parameter names of one task's adapter.
struct AdapterNames {
  std::vector<std::string> node_in;  // per type
  std::vector<std::string> edge_in;  // per pair, empty when the pair has no edges
  std::string out;
};

std::string task_prefix(const std::string& id);
AdapterNames adapter_names(const TaskSpec& spec);

template <typename T>
void init_codebook(ParamStore<T>& store, const BackboneConfig& bb, const CodebookConfig& cb, Rng& rng);

// Adds "task.<id>.*" tensors; nothing else in the store is touched.
template <typename T>
AdapterNames register_task(ParamStore<T>& store, const TaskSpec& spec, const BackboneConfig& bb,
                           const CodebookConfig& cb, Rng& rng);

// Node features x -> (x . in) . codebook; edge features go to factored
// EdgeEmbeddings with the edge codebook as lift.
template <typename T>
TypedEmbeddings embed_inputs(Tape<T>& tape, ParamStore<T>& store, const TaskSpec& spec, const CodebookConfig& cb,
                             const ModelInput& input);

// Logits over rows(action_type) x K.
template <typename T>
Var action_logits(Tape<T>& tape, ParamStore<T>& store, const TaskSpec& spec, Var node_out);

// Masked softmax over all N*K entries jointly.
PolicyOutput score_actions(std::span<const double> logits, const ModelInput& input);

// The composite linear map features -> embedding (F x D, or F̄ x D̄ for a pair),
// row-major, used to check the codebook rank bound.
template <typename T>
std::vector<double> composite_node_map(const ParamStore<T>& store, const TaskSpec& spec, const CodebookConfig& cb,
                                       int type);
template <typename T>
std::vector<double> composite_edge_map(const ParamStore<T>& store, const TaskSpec& spec, const CodebookConfig& cb,
                                       int pair);

}  // namespace gencop
