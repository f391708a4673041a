#include "gencop/model.hpp"

#include "gencop/hash.hpp"

namespace gencop {

template <typename T>
Model<T>::Model(const ModelConfig& cfg, std::uint64_t seed) : config_(cfg) {
  cfg.backbone.validate();
  Rng rng(stream_seed(seed, 0));
  init_backbone(params_, cfg.backbone, rng);
  init_codebook(params_, cfg.backbone, cfg.codebook, rng);
}

template <typename T>
const TaskSpec& Model<T>::task(const std::string& id) const {
  auto it = tasks_.find(id);
  if (it == tasks_.end()) throw UsageError("model: task " + id + " is not registered");
  return it->second;
}

template <typename T>
void Model<T>::register_task(const TaskSpec& spec, std::uint64_t seed) {
  if (has_task(spec.id)) throw UsageError("task " + spec.id + " is already registered");
  Rng rng(stream_seed(seed, fnv1a64(spec.id)));
  gencop::register_task(params_, spec, config_.backbone, config_.codebook, rng);
  tasks_.emplace(spec.id, spec);
}

template <typename T>
void Model<T>::attach_task(const TaskSpec& spec) {
  require_valid(spec.graph, spec);
  const auto names = adapter_names(spec);
  if (!params_.contains(names.out)) throw DataError("model: adapter tensors for task " + spec.id + " are missing");
  tasks_[spec.id] = spec;
}

template <typename T>
void Model<T>::drop_task(const std::string& id) {
  params_.erase_prefix(task_prefix(id));
  tasks_.erase(id);
}

template <typename T>
Var Model<T>::logits(Tape<T>& tape, const std::string& id, const ModelInput& input, int* blocks) {
  const auto& spec = task(id);
  TypedEmbeddings emb = embed_inputs(tape, params_, spec, config_.codebook, input);
  auto layers = bind_backbone(tape, params_, config_.backbone);
  Var out;
  if (!spec.multi_type()) {
    const EdgeEmbedding* e = spec.graph.pairs.at(0).edges ? &emb.pairs[0] : nullptr;
    out = backbone_forward(tape, emb.nodes[0], e, std::span<const LayerParams>(layers), config_.attention);
    if (blocks) *blocks += static_cast<int>(layers.size());
  } else {
    emb = typed_backbone_forward(tape, std::move(emb), spec.graph, std::span<const LayerParams>(layers),
                                 config_.attention, blocks);
    out = emb.nodes[static_cast<std::size_t>(spec.action_type)];
  }
  return action_logits(tape, params_, spec, out);
}

template <typename T>
Var Model<T>::loss(Tape<T>& tape, const std::string& id, const ModelInput& input, std::span<const int> targets) {
  Var l = logits(tape, id, input);
  std::vector<T> mask(input.mask.begin(), input.mask.end());
  return ops::set_nll(tape, l, std::span<const T>(mask), targets);
}

template <typename T>
PolicyOutput Model<T>::policy(const std::string& id, const ModelInput& input) {
  Tape<T> tape(false);
  Var l = logits(tape, id, input);
  auto v = tape.value(l);
  std::vector<double> lg(v.begin(), v.end());
  return score_actions(lg, input);
}

template class Model<float>;
template class Model<double>;
template class Model<long double>;

}  // namespace gencop
