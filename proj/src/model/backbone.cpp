#include "gencop/backbone.hpp"

#include <cmath>

namespace gencop {

void BackboneConfig::validate() const {
  if (layers < 0 || dim <= 0 || edge_dim <= 0 || heads <= 0 || ff_dim <= 0) {
    throw UsageError("backbone: sizes must be positive");
  }
  if (dim % heads != 0) {
    throw UsageError("backbone: D=" + std::to_string(dim) + " is not divisible by H=" + std::to_string(heads));
  }
}

std::string layer_prefix(int layer) { return "layer." + std::to_string(layer) + "."; }

namespace {

template <typename T>
void fill_uniform(Tensor<T>& t, double bound, Rng& rng) {
  for (auto& v : t.values) v = static_cast<T>(rng.uniform(-bound, bound));
}

}  // namespace

template <typename T>
void init_backbone(ParamStore<T>& store, const BackboneConfig& cfg, Rng& rng) {
  cfg.validate();
  const auto D = static_cast<std::size_t>(cfg.dim);
  const auto E = static_cast<std::size_t>(cfg.edge_dim);
  const auto F = static_cast<std::size_t>(cfg.ff_dim);
  const double node_bound = 1.0 / std::sqrt(static_cast<double>(D));
  for (int l = 0; l < cfg.layers; ++l) {
    const auto p = layer_prefix(l);
    for (const char* w : {"attn.WQ", "attn.WK", "attn.WV", "attn.WO"}) fill_uniform(store.add(p + w, {D, D}), node_bound, rng);
    for (const char* w : {"attn.WQ_edge", "attn.WK_edge"}) {
      fill_uniform(store.add(p + w, {E, D}), 1.0 / std::sqrt(static_cast<double>(E)), rng);
    }
    fill_uniform(store.add(p + "ff.W1", {D, F}), node_bound, rng);
    fill_uniform(store.add(p + "ff.W2", {F, D}), 1.0 / std::sqrt(static_cast<double>(F)), rng);
    store.add(p + "alpha_attn", {1});
    store.add(p + "alpha_ff", {1});
  }
}

template <typename T>
LayerParams bind_layer(Tape<T>& tape, ParamStore<T>& store, const BackboneConfig& cfg, int layer) {
  const auto p = layer_prefix(layer);
  LayerParams lp;
  lp.attn.wq = tape.param(store.at(p + "attn.WQ"));
  lp.attn.wk = tape.param(store.at(p + "attn.WK"));
  lp.attn.wv = tape.param(store.at(p + "attn.WV"));
  lp.attn.wo = tape.param(store.at(p + "attn.WO"));
  lp.attn.wq_edge = tape.param(store.at(p + "attn.WQ_edge"));
  lp.attn.wk_edge = tape.param(store.at(p + "attn.WK_edge"));
  lp.attn.heads = cfg.heads;
  lp.ff_in = tape.param(store.at(p + "ff.W1"));
  lp.ff_out = tape.param(store.at(p + "ff.W2"));
  lp.alpha_attn = tape.param(store.at(p + "alpha_attn"));
  lp.alpha_ff = tape.param(store.at(p + "alpha_ff"));
  return lp;
}

template <typename T>
std::vector<LayerParams> bind_backbone(Tape<T>& tape, ParamStore<T>& store, const BackboneConfig& cfg) {
  std::vector<LayerParams> out;
  out.reserve(static_cast<std::size_t>(cfg.layers));
  for (int l = 0; l < cfg.layers; ++l) out.push_back(bind_layer(tape, store, cfg, l));
  return out;
}

template <typename T>
Var rezero_attention(Tape<T>& tape, Var target, Var source, const EdgeEmbedding* edges, const LayerParams& layer,
                     AttentionOptions opt) {
  AttentionInputs<T> in;
  in.queries = target;
  in.keys = source;
  in.values = source;
  in.edges = edges;
  if (!edges) opt.mode = AttentionMode::vanilla;
  Var r = attention_forward(tape, in, layer.attn, opt);
  return ops::add(tape, target, ops::scale(tape, r, layer.alpha_attn));
}

template <typename T>
Var rezero_feed_forward(Tape<T>& tape, Var x, const LayerParams& layer) {
  Var h = ops::relu(tape, ops::matmul(tape, x, layer.ff_in));
  Var y = ops::matmul(tape, h, layer.ff_out);
  return ops::add(tape, x, ops::scale(tape, y, layer.alpha_ff));
}

template <typename T>
Var layer_forward(Tape<T>& tape, Var x, const EdgeEmbedding* edges, const LayerParams& layer, AttentionOptions opt) {
  const auto& s = tape.shape(x);
  const auto& wq = tape.shape(layer.attn.wq);
  if (s.size() != 2 || s[1] != wq[0]) {
    throw ShapeError("layer_forward: node embeddings " + shape_str(s) + " do not match D=" + std::to_string(wq[0]));
  }
  Var x1 = rezero_attention(tape, x, x, edges, layer, opt);
  return rezero_feed_forward(tape, x1, layer);
}

template <typename T>
Var backbone_forward(Tape<T>& tape, Var x, const EdgeEmbedding* edges, std::span<const LayerParams> layers,
                     AttentionOptions opt) {
  for (const auto& layer : layers) x = layer_forward(tape, x, edges, layer, opt);
  return x;
}

#define GENCOP_INSTANTIATE_BACKBONE(T)                                                                          \
  template void init_backbone<T>(ParamStore<T>&, const BackboneConfig&, Rng&);                                  \
  template LayerParams bind_layer<T>(Tape<T>&, ParamStore<T>&, const BackboneConfig&, int);                     \
  template std::vector<LayerParams> bind_backbone<T>(Tape<T>&, ParamStore<T>&, const BackboneConfig&);          \
  template Var rezero_attention<T>(Tape<T>&, Var, Var, const EdgeEmbedding*, const LayerParams&,                \
                                   AttentionOptions);                                                           \
  template Var rezero_feed_forward<T>(Tape<T>&, Var, const LayerParams&);                                       \
  template Var layer_forward<T>(Tape<T>&, Var, const EdgeEmbedding*, const LayerParams&, AttentionOptions);     \
  template Var backbone_forward<T>(Tape<T>&, Var, const EdgeEmbedding*, std::span<const LayerParams>,           \
                                   AttentionOptions);

GENCOP_INSTANTIATE_BACKBONE(float)
GENCOP_INSTANTIATE_BACKBONE(double)
GENCOP_INSTANTIATE_BACKBONE(long double)

#undef GENCOP_INSTANTIATE_BACKBONE

}  // namespace gencop
