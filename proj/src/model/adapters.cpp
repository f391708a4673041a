#include "gencop/adapters.hpp"

#include <cmath>
#include <limits>

namespace gencop {

std::string task_prefix(const std::string& id) { return "task." + id + "."; }

AdapterNames adapter_names(const TaskSpec& spec) {
  AdapterNames n;
  const auto p = task_prefix(spec.id);
  for (std::size_t t = 0; t < spec.graph.types.size(); ++t) n.node_in.push_back(p + "in." + spec.graph.types[t]);
  for (std::size_t i = 0; i < spec.graph.pairs.size(); ++i) {
    n.edge_in.push_back(spec.graph.pairs[i].edges ? p + "edge." + std::to_string(i) : std::string{});
  }
  n.out = p + "out";
  return n;
}

namespace {

template <typename T>
void fill(Tensor<T>& t, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(t.shape[0]));
  for (auto& v : t.values) v = static_cast<T>(rng.uniform(-bound, bound));
}

template <typename T>
std::vector<T> cast_values(const std::vector<double>& v) {
  return std::vector<T>(v.begin(), v.end());
}

std::vector<double> product(const std::vector<double>& a, const std::vector<double>& b, std::size_t n, std::size_t k,
                            std::size_t m) {
  std::vector<double> out(n * m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t c = 0; c < m; ++c) out[i * m + c] += a[i * k + j] * b[j * m + c];
  return out;
}

}  // namespace

template <typename T>
void init_codebook(ParamStore<T>& store, const BackboneConfig& bb, const CodebookConfig& cb, Rng& rng) {
  if (cb.bypass) return;
  if (cb.node_codes < 1 || cb.edge_codes < 1) throw UsageError("codebook: code sizes must be positive");
  fill(store.add("codebook.node", {static_cast<std::size_t>(cb.node_codes), static_cast<std::size_t>(bb.dim)}), rng);
  fill(store.add("codebook.edge", {static_cast<std::size_t>(cb.edge_codes), static_cast<std::size_t>(bb.edge_dim)}), rng);
}

template <typename T>
AdapterNames register_task(ParamStore<T>& store, const TaskSpec& spec, const BackboneConfig& bb,
                           const CodebookConfig& cb, Rng& rng) {
  require_valid(spec.graph, spec);
  const auto names = adapter_names(spec);
  for (const auto& [name, t] : store) {
    if (name.rfind(task_prefix(spec.id), 0) == 0) throw UsageError("task " + spec.id + " is already registered");
  }
  const std::size_t node_w = cb.bypass ? static_cast<std::size_t>(bb.dim) : static_cast<std::size_t>(cb.node_codes);
  const std::size_t edge_w = cb.bypass ? static_cast<std::size_t>(bb.edge_dim) : static_cast<std::size_t>(cb.edge_codes);
  for (std::size_t t = 0; t < names.node_in.size(); ++t) {
    fill(store.add(names.node_in[t], {static_cast<std::size_t>(spec.node_features[t]), node_w}), rng);
  }
  for (std::size_t i = 0; i < names.edge_in.size(); ++i) {
    if (names.edge_in[i].empty()) continue;
    fill(store.add(names.edge_in[i], {static_cast<std::size_t>(spec.edge_features[i]), edge_w}), rng);
  }
  fill(store.add(names.out, {static_cast<std::size_t>(bb.dim), static_cast<std::size_t>(spec.options)}), rng);
  return names;
}

template <typename T>
TypedEmbeddings embed_inputs(Tape<T>& tape, ParamStore<T>& store, const TaskSpec& spec, const CodebookConfig& cb,
                             const ModelInput& input) {
  const auto names = adapter_names(spec);
  if (input.types.size() != names.node_in.size() || input.pairs.size() != names.edge_in.size()) {
    throw ShapeError("embed_inputs: input layout does not match task " + spec.id);
  }
  TypedEmbeddings emb;
  Var node_cb = cb.bypass ? Var{} : tape.param(store.at("codebook.node"));
  Var edge_cb = cb.bypass ? Var{} : tape.param(store.at("codebook.edge"));
  for (std::size_t t = 0; t < input.types.size(); ++t) {
    const auto& blk = input.types[t];
    if (blk.cols != spec.node_features[t]) {
      throw ShapeError("embed_inputs: task " + spec.id + " expects " + std::to_string(spec.node_features[t]) +
                       " node features for type " + spec.graph.types[t] + ", got " + std::to_string(blk.cols));
    }
    Var x = tape.constant({static_cast<std::size_t>(blk.rows()), static_cast<std::size_t>(blk.cols)},
                          cast_values<T>(blk.values));
    Var codes = ops::matmul(tape, x, tape.param(store.at(names.node_in[t])));
    emb.nodes.push_back(cb.bypass ? codes : ops::matmul(tape, codes, node_cb));
  }
  for (std::size_t i = 0; i < input.pairs.size(); ++i) {
    EdgeEmbedding e;
    if (!names.edge_in[i].empty()) {
      const auto& blk = input.pairs[i];
      const auto& pr = spec.graph.pairs[i];
      if (blk.channels != spec.edge_features[i]) {
        throw ShapeError("embed_inputs: task " + spec.id + " expects " + std::to_string(spec.edge_features[i]) +
                         " edge features on pair " + std::to_string(i) + ", got " + std::to_string(blk.channels));
      }
      const auto ms = static_cast<std::size_t>(input.types[static_cast<std::size_t>(pr.source)].rows());
      const auto nt = static_cast<std::size_t>(input.types[static_cast<std::size_t>(pr.target)].rows());
      Var x = tape.constant({ms, nt, static_cast<std::size_t>(blk.channels)}, cast_values<T>(blk.values));
      e.codes = ops::matmul(tape, x, tape.param(store.at(names.edge_in[i])));
      e.lift = edge_cb;
    }
    emb.pairs.push_back(e);
  }
  return emb;
}

template <typename T>
Var action_logits(Tape<T>& tape, ParamStore<T>& store, const TaskSpec& spec, Var node_out) {
  return ops::matmul(tape, node_out, tape.param(store.at(task_prefix(spec.id) + "out")));
}

PolicyOutput score_actions(std::span<const double> logits, const ModelInput& input) {
  const auto& blk = input.types.at(static_cast<std::size_t>(input.action_type));
  const std::size_t n = static_cast<std::size_t>(blk.rows()) * static_cast<std::size_t>(input.options);
  if (logits.size() != n) throw ShapeError("score_actions: logits do not cover N x K");
  if (!input.mask.empty() && input.mask.size() != n) throw ShapeError("score_actions: mask does not cover N x K");
  PolicyOutput out;
  out.nodes = blk.nodes;
  out.options = input.options;
  out.logits.assign(logits.begin(), logits.end());
  out.probs.assign(n, 0.0);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (input.mask.empty() || input.mask[i] == 0.0) mx = std::max(mx, logits[i]);
  }
  if (mx == -std::numeric_limits<double>::infinity()) throw DataError("score_actions: every action is masked");
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (input.mask.empty() || input.mask[i] == 0.0) z += out.probs[i] = std::exp(logits[i] - mx);
  }
  for (auto& p : out.probs) p /= z;
  return out;
}

template <typename T>
std::vector<double> composite_node_map(const ParamStore<T>& store, const TaskSpec& spec, const CodebookConfig& cb,
                                       int type) {
  const auto names = adapter_names(spec);
  const auto& in = store.at(names.node_in.at(static_cast<std::size_t>(type)));
  std::vector<double> a(in.values.begin(), in.values.end());
  if (cb.bypass) return a;
  const auto& c = store.at("codebook.node");
  return product(a, std::vector<double>(c.values.begin(), c.values.end()), in.shape[0], in.shape[1], c.shape[1]);
}

template <typename T>
std::vector<double> composite_edge_map(const ParamStore<T>& store, const TaskSpec& spec, const CodebookConfig& cb,
                                       int pair) {
  const auto names = adapter_names(spec);
  const auto& name = names.edge_in.at(static_cast<std::size_t>(pair));
  if (name.empty()) throw UsageError("composite_edge_map: pair has no edge features");
  const auto& in = store.at(name);
  std::vector<double> a(in.values.begin(), in.values.end());
  if (cb.bypass) return a;
  const auto& c = store.at("codebook.edge");
  return product(a, std::vector<double>(c.values.begin(), c.values.end()), in.shape[0], in.shape[1], c.shape[1]);
}

#define GENCOP_INSTANTIATE_ADAPTERS(T)                                                                           \
  template void init_codebook<T>(ParamStore<T>&, const BackboneConfig&, const CodebookConfig&, Rng&);           \
  template AdapterNames register_task<T>(ParamStore<T>&, const TaskSpec&, const BackboneConfig&,                \
                                         const CodebookConfig&, Rng&);                                          \
  template TypedEmbeddings embed_inputs<T>(Tape<T>&, ParamStore<T>&, const TaskSpec&, const CodebookConfig&,    \
                                           const ModelInput&);                                                  \
  template Var action_logits<T>(Tape<T>&, ParamStore<T>&, const TaskSpec&, Var);                                \
  template std::vector<double> composite_node_map<T>(const ParamStore<T>&, const TaskSpec&,                     \
                                                     const CodebookConfig&, int);                               \
  template std::vector<double> composite_edge_map<T>(const ParamStore<T>&, const TaskSpec&,                     \
                                                     const CodebookConfig&, int);

GENCOP_INSTANTIATE_ADAPTERS(float)
GENCOP_INSTANTIATE_ADAPTERS(double)
GENCOP_INSTANTIATE_ADAPTERS(long double)

#undef GENCOP_INSTANTIATE_ADAPTERS

}  // namespace gencop
