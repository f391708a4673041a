#pragma once

#include <span>
#include <string>
#include <vector>

#include "gencop/attention.hpp"
#include "gencop/rng.hpp"

namespace gencop {

struct BackboneConfig {
  int layers = 4;
  int dim = 64;       // D
  int edge_dim = 64;  // D̄
  int heads = 4;
  int ff_dim = 256;

  static BackboneConfig desk() { return {}; }
  static BackboneConfig paper() { return {9, 128, 128, 8, 512}; }
  void validate() const;
  bool operator==(const BackboneConfig&) const = default;
};

// One transformer layer bound to a tape: mixed-attention heads, a two-matrix
// ReLU feed-forward block and the two ReZero gates.
struct LayerParams {
  HeadParams attn;
  Var ff_in;   // D x F_ff
  Var ff_out;  // F_ff x D
  Var alpha_attn;
  Var alpha_ff;
};

std::string layer_prefix(int layer);

// Adds "layer.<l>.*" tensors for every layer. Matrices are uniform in
// ±1/sqrt(fan_in); ReZero gates start at 0.
template <typename T>
void init_backbone(ParamStore<T>& store, const BackboneConfig& cfg, Rng& rng);

template <typename T>
LayerParams bind_layer(Tape<T>& tape, ParamStore<T>& store, const BackboneConfig& cfg, int layer);

template <typename T>
std::vector<LayerParams> bind_backbone(Tape<T>& tape, ParamStore<T>& store, const BackboneConfig& cfg);

// x1 = x + a_attn * MMA(x, x, x, e); out = x1 + a_ff * FF(x1). `edges` may be
// null, which runs the attention as vanilla.
template <typename T>
Var layer_forward(Tape<T>& tape, Var x, const EdgeEmbedding* edges, const LayerParams& layer, AttentionOptions opt);

template <typename T>
Var backbone_forward(Tape<T>& tape, Var x, const EdgeEmbedding* edges, std::span<const LayerParams> layers,
                     AttentionOptions opt);

// Shared pieces reused by the multi-type layer.
template <typename T>
Var rezero_attention(Tape<T>& tape, Var target, Var source, const EdgeEmbedding* edges, const LayerParams& layer,
                     AttentionOptions opt);
template <typename T>
Var rezero_feed_forward(Tape<T>& tape, Var x, const LayerParams& layer);

}  // namespace gencop
