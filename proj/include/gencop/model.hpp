#pragma once

#include <map>
#include <string>
#include <vector>

#include "gencop/adapters.hpp"

namespace gencop {

struct ModelConfig {
  BackboneConfig backbone = BackboneConfig::desk();
  CodebookConfig codebook;
  AttentionOptions attention;
  bool operator==(const ModelConfig& o) const {
    return backbone == o.backbone && codebook == o.codebook && attention.mode == o.attention.mode &&
           attention.scale_scores == o.attention.scale_scores;
  }
};

// Backbone + codebooks + per-task adapters over one parameter store.
template <typename T>
class Model {
 public:
  Model() = default;
  Model(const ModelConfig& cfg, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  ParamStore<T>& params() { return params_; }
  const ParamStore<T>& params() const { return params_; }
  const std::map<std::string, TaskSpec>& tasks() const { return tasks_; }
  bool has_task(const std::string& id) const { return tasks_.count(id) > 0; }
  const TaskSpec& task(const std::string& id) const;

  // Fresh adapter for `spec`, seeded from (seed, task id).
  void register_task(const TaskSpec& spec, std::uint64_t seed);
  // Records a task whose adapter tensors are already in the store.
  void attach_task(const TaskSpec& spec);
  void drop_task(const std::string& id);

  // Logits over the action rows x K of `input`. `blocks` counts executed
  // attention blocks.
  Var logits(Tape<T>& tape, const std::string& task, const ModelInput& input, int* blocks = nullptr);
  Var loss(Tape<T>& tape, const std::string& task, const ModelInput& input, std::span<const int> targets);
  PolicyOutput policy(const std::string& task, const ModelInput& input);

  template <typename U>
  Model<U> cast() const {
    Model<U> m;
    m.adopt(config_, params_.template cast<U>(), tasks_);
    return m;
  }
  void adopt(const ModelConfig& cfg, ParamStore<T> params, std::map<std::string, TaskSpec> tasks) {
    config_ = cfg;
    params_ = std::move(params);
    tasks_ = std::move(tasks);
  }

 private:
  ModelConfig config_;
  ParamStore<T> params_;
  std::map<std::string, TaskSpec> tasks_;
};

extern template class Model<float>;
extern template class Model<double>;
extern template class Model<long double>;

}  // namespace gencop
