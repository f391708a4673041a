#include "gencop/multitype.hpp"

namespace gencop {

ConfigReport validate_config(const TypeGraphConfig& cfg, const TaskSpec& task) {
  ConfigReport r;
  auto fail = [&](std::string msg) {
    r.ok = false;
    r.problems.push_back(std::move(msg));
  };
  const int nt = static_cast<int>(cfg.types.size());
  if (nt == 0) fail("no node types");
  if (cfg.feed_forward.size() != cfg.types.size()) fail("feed_forward flags do not match the type count");
  if (task.node_features.size() != cfg.types.size()) {
    fail("task " + task.id + " declares " + std::to_string(task.node_features.size()) + " node feature widths for " +
         std::to_string(nt) + " types");
  }
  if (task.edge_features.size() != cfg.pairs.size()) {
    fail("task " + task.id + " declares edge widths for " + std::to_string(task.edge_features.size()) + " pairs, graph has " +
         std::to_string(cfg.pairs.size()));
  }
  std::vector<bool> targeted(cfg.types.size(), false);
  for (std::size_t i = 0; i < cfg.pairs.size(); ++i) {
    const auto& p = cfg.pairs[i];
    if (p.target < 0 || p.target >= nt || p.source < 0 || p.source >= nt) {
      fail("pair " + std::to_string(i) + " references a dangling type");
      continue;
    }
    targeted[static_cast<std::size_t>(p.target)] = true;
    const std::string name = "(" + cfg.types[static_cast<std::size_t>(p.target)] + ", " +
                             cfg.types[static_cast<std::size_t>(p.source)] + ")";
    const int declared = i < task.edge_features.size() ? task.edge_features[i] : 0;
    if (p.edges && declared <= 0) fail("pair " + name + " is flagged with edges but task " + task.id + " declares none");
    if (!p.edges && declared > 0) fail("pair " + name + " has edge features in task " + task.id + " but is not flagged");
  }
  for (int t = 0; t < nt; ++t) {
    if (!targeted[static_cast<std::size_t>(t)]) fail("type " + cfg.types[static_cast<std::size_t>(t)] + " is never a target");
  }
  for (int f : task.node_features) {
    if (f < 1) fail("task " + task.id + " has a node type without features");
  }
  if (task.options < 1) fail("task " + task.id + " has no options");
  if (task.action_type < 0 || task.action_type >= nt) fail("task " + task.id + " acts on an unknown type");
  return r;
}

void require_valid(const TypeGraphConfig& cfg, const TaskSpec& task) {
  auto r = validate_config(cfg, task);
  if (r.ok) return;
  std::string msg = "invalid type graph:";
  for (const auto& p : r.problems) msg += " " + p + ";";
  throw UsageError(msg);
}

template <typename T>
TypedEmbeddings typed_layer_forward(Tape<T>& tape, const TypedEmbeddings& emb, const TypeGraphConfig& cfg,
                                    const LayerParams& layer, AttentionOptions opt, int* blocks) {
  TypedEmbeddings out = emb;
  auto rows = [&](Var v) { return tape.shape(v)[0]; };
  for (std::size_t t = 0; t < cfg.types.size(); ++t) {
    Var cur = emb.nodes[t];
    if (rows(cur) == 0) {
      continue;
    }
    for (std::size_t i = 0; i < cfg.pairs.size(); ++i) {
      const auto& p = cfg.pairs[i];
      if (static_cast<std::size_t>(p.target) != t) continue;
      const bool self = p.source == p.target;
      Var src = self ? cur : emb.nodes[static_cast<std::size_t>(p.source)];
      if (rows(src) == 0) continue;
      const EdgeEmbedding* e = p.edges ? &emb.pairs[i] : nullptr;
      AttentionOptions o = opt;
      if (!p.edges) o.mode = AttentionMode::vanilla;
      cur = rezero_attention(tape, cur, src, e, layer, o);
      if (blocks) ++*blocks;
    }
    if (cfg.feed_forward[t]) cur = rezero_feed_forward(tape, cur, layer);
    out.nodes[t] = cur;
  }
  return out;
}

template <typename T>
TypedEmbeddings typed_backbone_forward(Tape<T>& tape, TypedEmbeddings emb, const TypeGraphConfig& cfg,
                                       std::span<const LayerParams> layers, AttentionOptions opt, int* blocks) {
  for (const auto& layer : layers) emb = typed_layer_forward(tape, emb, cfg, layer, opt, blocks);
  return emb;
}

template TypedEmbeddings typed_layer_forward<float>(Tape<float>&, const TypedEmbeddings&, const TypeGraphConfig&,
                                                    const LayerParams&, AttentionOptions, int*);
template TypedEmbeddings typed_layer_forward<double>(Tape<double>&, const TypedEmbeddings&, const TypeGraphConfig&,
                                                     const LayerParams&, AttentionOptions, int*);
template TypedEmbeddings typed_backbone_forward<float>(Tape<float>&, TypedEmbeddings, const TypeGraphConfig&,
                                                       std::span<const LayerParams>, AttentionOptions, int*);
template TypedEmbeddings typed_backbone_forward<double>(Tape<double>&, TypedEmbeddings, const TypeGraphConfig&,
                                                        std::span<const LayerParams>, AttentionOptions, int*);
template TypedEmbeddings typed_layer_forward<long double>(Tape<long double>&, const TypedEmbeddings&,
                                                          const TypeGraphConfig&, const LayerParams&, AttentionOptions,
                                                          int*);
template TypedEmbeddings typed_backbone_forward<long double>(Tape<long double>&, TypedEmbeddings,
                                                             const TypeGraphConfig&, std::span<const LayerParams>,
                                                             AttentionOptions, int*);

}  // namespace gencop
