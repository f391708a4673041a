#pragma once

#include <string>
#include <vector>

#include "gencop/backbone.hpp"
#include "gencop/task.hpp"

namespace gencop {

// Node embeddings per type (rows may be zero) and one edge embedding per
// attended pair; pairs without edges hold an empty EdgeEmbedding.
struct TypedEmbeddings {
  std::vector<Var> nodes;
  std::vector<EdgeEmbedding> pairs;
};

struct ConfigReport {
  bool ok = true;
  std::vector<std::string> problems;
};

// Checks type indices, per-type FF flags, that every type is the target of
// some pair and that each pair's edge flag matches the task's edge features.
ConfigReport validate_config(const TypeGraphConfig& cfg, const TaskSpec& task);
void require_valid(const TypeGraphConfig& cfg, const TaskSpec& task);

// One typed layer. For each target type in order, its pairs run in config
// order as ReZero attention blocks sharing the layer's heads: the self pair
// attends over the running target embedding, cross pairs over the source
// type's layer input. Each type with the flag set then passes through the
// layer's single feed-forward block. Blocks with an empty side are skipped.
// `blocks`, when given, is incremented once per executed attention block.
template <typename T>
TypedEmbeddings typed_layer_forward(Tape<T>& tape, const TypedEmbeddings& emb, const TypeGraphConfig& cfg,
                                    const LayerParams& layer, AttentionOptions opt, int* blocks = nullptr);

template <typename T>
TypedEmbeddings typed_backbone_forward(Tape<T>& tape, TypedEmbeddings emb, const TypeGraphConfig& cfg,
                                       std::span<const LayerParams> layers, AttentionOptions opt,
                                       int* blocks = nullptr);

}  // namespace gencop
