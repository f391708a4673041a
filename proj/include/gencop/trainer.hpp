#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gencop/env.hpp"
#include "gencop/model.hpp"

namespace gencop {

struct TrainConfig {
  double learning_rate = 5e-4;
  double decay = 0.97;
  int decay_every = 10;       // epochs per decay step
  int batch = 32;
  int epochs = 10;
  int steps_per_epoch = 0;    // 0: one pass over the training trajectories
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  bool freeze_backbone = false;
  int validate_every = 1;     // epochs; 0 disables validation
};

double scheduled_lr(const TrainConfig& cfg, int epoch);

// AdamW moments per parameter tensor, each with its own step count (a
// tensor only advances when it received a gradient).
struct Moments {
  std::vector<double> m, v;
  std::int64_t steps = 0;
};
struct OptimState {
  std::map<std::string, Moments> slots;
  std::int64_t step = 0;  // optimizer steps taken
  int epoch = 0;          // completed epochs
};

template <typename T>
void adamw_update(ParamStore<T>& params, OptimState& state, const TrainConfig& cfg, double lr);

// -log of the probability mass on the targets.
double imitation_loss(const PolicyOutput& policy, const std::vector<int>& targets, LossMode mode);

struct Sample {
  ModelInput input;
  std::vector<int> targets;
};
Sample make_sample(const Trajectory& traj, std::size_t t);

// Mean loss over a single-task batch, then one AdamW step at `lr`.
template <typename T>
double train_step(Model<T>& model, const std::string& task, const std::vector<Sample>& batch, OptimState& optim,
                  const TrainConfig& cfg, double lr);

struct TaskData {
  std::vector<Trajectory> train;
  std::vector<Trajectory> valid;  // oracle trajectories; their objectives are the reference
};

struct GapReport {
  std::string task;
  std::vector<double> objective, reference, gaps;
  double mean = 0.0, p50 = 0.0, p90 = 0.0, worst = 0.0;
  double seconds = 0.0;  // wall clock, not part of persisted reports
};

struct Metric {
  int epoch = 0;
  std::string task;
  double loss = 0.0;  // mean training loss of the epoch's steps on this task
  int steps = 0;
  double gap = 0.0;   // validation greedy gap, NaN when not validated
  double lr = 0.0;
};
using MetricSink = std::function<void(const Metric&)>;

template <typename T>
struct TrainResult {
  ParamStore<T> best;
  int best_epoch = -1;
  double best_gap = 0.0;
  std::vector<Metric> metrics;
  std::map<std::string, int> task_draws;
};

template <typename T>
TrainResult<T> train_multitask(Model<T>& model, const std::map<std::string, TaskData>& data, const TrainConfig& cfg,
                               OptimState& optim, const MetricSink& sink = {});

// One step per tail subproblem of every labeled trajectory, in order.
// Registers a fresh adapter when the model does not know the task.
template <typename T>
void finetune_supervised(Model<T>& model, const std::vector<Trajectory>& labeled, const TrainConfig& cfg,
                         OptimState& optim);

struct SelfImproveReport {
  std::vector<std::vector<double>> incumbents;  // per round, per instance
  std::vector<double> round_mean;
};

// Expert = best of `width` sampled rollouts; incumbents only change on
// strict improvement (tolerance 1e-9). After each round the model imitates
// every incumbent once per tail subproblem, in shuffled batches.
template <typename T>
SelfImproveReport finetune_self_improve(Model<T>& model, const std::string& task, const std::vector<Instance>& instances,
                                        int width, int rounds, const TrainConfig& cfg, OptimState& optim);

enum class EvalDecode { greedy, sample };

template <typename T>
Policy model_policy(Model<T>& model, const std::string& task);

// Gap of the model's greedy (or best-of-k sampled) rollouts against the
// references.
template <typename T>
GapReport evaluate(Model<T>& model, const std::string& task, const std::vector<Trajectory>& references,
                   EvalDecode decode = EvalDecode::greedy, int k = 1, std::uint64_t seed = 0);

// Gap report for arbitrary objectives against references.
GapReport gap_report(const std::string& task, std::vector<double> objective, std::vector<double> reference);

}  // namespace gencop
