#include "gencop/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "gencop/error.hpp"
#include "gencop/parallel.hpp"
#include "gencop/rng.hpp"

namespace gencop {

double scheduled_lr(const TrainConfig& cfg, int epoch) {
  const int every = std::max(cfg.decay_every, 1);
  return cfg.learning_rate * std::pow(cfg.decay, static_cast<double>(epoch / every));
}

template <typename T>
void adamw_update(ParamStore<T>& params, OptimState& state, const TrainConfig& cfg, double lr) {
  for (auto& [name, t] : params) {
    if (!t.touched) continue;
    if (cfg.freeze_backbone && name.rfind("task.", 0) != 0) continue;
    auto& slot = state.slots[name];
    if (slot.m.size() != t.size()) {
      slot.m.assign(t.size(), 0.0);
      slot.v.assign(t.size(), 0.0);
      slot.steps = 0;
    }
    ++slot.steps;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(slot.steps));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(slot.steps));
    const double step_size = lr / bc1;
    const double bc2_sqrt = std::sqrt(bc2);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double g = static_cast<double>(t.grad[i]);
      slot.m[i] = cfg.beta1 * slot.m[i] + (1.0 - cfg.beta1) * g;
      slot.v[i] = cfg.beta2 * slot.v[i] + (1.0 - cfg.beta2) * g * g;
      double p = static_cast<double>(t.values[i]) * (1.0 - lr * cfg.weight_decay);
      p -= step_size * slot.m[i] / (std::sqrt(slot.v[i]) / bc2_sqrt + cfg.adam_eps);
      t.values[i] = static_cast<T>(p);
    }
  }
  params.zero_grad();
  ++state.step;
}

double imitation_loss(const PolicyOutput& policy, const std::vector<int>& targets, LossMode mode) {
  if (targets.empty()) throw DataError("imitation_loss: empty target set");
  if (mode == LossMode::single_class && targets.size() != 1) {
    throw DataError("imitation_loss: single-class loss takes exactly one target");
  }
  double mass = 0.0;
  for (int i : targets) {
    if (i < 0 || static_cast<std::size_t>(i) >= policy.probs.size()) throw DataError("imitation_loss: target out of range");
    if (policy.probs[static_cast<std::size_t>(i)] <= 0.0) {
      throw DataError("imitation_loss: target action " + std::to_string(i) + " is masked");
    }
    mass += policy.probs[static_cast<std::size_t>(i)];
  }
  return -std::log(std::min(mass, 1.0));
}

Sample make_sample(const Trajectory& traj, std::size_t t) {
  auto suffix = suffix_state(traj, t);
  return {model_input(suffix.state), std::move(suffix.targets)};
}

template <typename T>
double train_step(Model<T>& model, const std::string& task, const std::vector<Sample>& batch, OptimState& optim,
                  const TrainConfig& cfg, double lr) {
  if (batch.empty()) throw UsageError("train_step: empty batch");
  Tape<T> tape;
  Var total;
  for (const auto& s : batch) {
    Var l = model.loss(tape, task, s.input, s.targets);
    total = total.valid() ? ops::add(tape, total, l) : l;
  }
  total = ops::scale(tape, total, 1.0 / static_cast<double>(batch.size()));
  const double loss = static_cast<double>(tape.item(total));
  if (!std::isfinite(loss)) {
    std::ostringstream os;
    os << "train_step: non-finite loss " << loss << " on task " << task << " at optimizer step " << optim.step
       << " (batch of " << batch.size() << ", lr " << lr << ")";
    throw NumericalError(os.str());
  }
  tape.backward(total);
  for (const auto& [name, t] : model.params()) {
    if (!t.touched) continue;
    for (auto g : t.grad)
      if (!std::isfinite(static_cast<double>(g))) {
        throw NumericalError("train_step: non-finite gradient in " + name + " on task " + task + " at step " +
                             std::to_string(optim.step));
      }
  }
  adamw_update(model.params(), optim, cfg, lr);
  return loss;
}

GapReport gap_report(const std::string& task, std::vector<double> objective, std::vector<double> reference) {
  if (objective.size() != reference.size()) throw ShapeError("gap_report: objective and reference counts differ");
  GapReport r;
  r.task = task;
  const auto& spec = task_spec(task);
  for (std::size_t i = 0; i < objective.size(); ++i) r.gaps.push_back(gap(spec, objective[i], reference[i]));
  r.objective = std::move(objective);
  r.reference = std::move(reference);
  if (r.gaps.empty()) return r;
  double sum = 0.0;
  for (double g : r.gaps) sum += g;
  r.mean = sum / static_cast<double>(r.gaps.size());
  auto sorted = r.gaps;
  std::sort(sorted.begin(), sorted.end());
  auto rank = [&](double q) {
    const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
    return sorted[std::min(sorted.size() - 1, k == 0 ? 0 : k - 1)];
  };
  r.p50 = rank(0.5);
  r.p90 = rank(0.9);
  r.worst = sorted.back();
  return r;
}

template <typename T>
Policy model_policy(Model<T>& model, const std::string& task) {
  return [&model, task](const Instance&, const ModelInput& in) { return model.policy(task, in); };
}

template <typename T>
GapReport evaluate(Model<T>& model, const std::string& task, const std::vector<Trajectory>& references,
                   EvalDecode decode, int k, std::uint64_t seed) {
  if (!model.has_task(task)) throw UsageError("evaluate: task " + task + " is not registered in the model");
  const auto start = std::chrono::steady_clock::now();
  const auto& spec = task_spec(task);
  std::vector<double> obj(references.size()), ref(references.size());
  const auto policy = model_policy(model, task);
  parallel_for(references.size(), [&](std::size_t i) {
    const auto& r = references[i];
    if (!std::isfinite(r.objective)) throw DataError("evaluate: missing oracle objective for instance " + std::to_string(i));
    ref[i] = r.objective;
    if (decode == EvalDecode::greedy) {
      obj[i] = rollout(r.initial, policy, Decode::greedy, 0).objective;
      return;
    }
    double best = 0.0;
    for (int j = 0; j < std::max(k, 1); ++j) {
      const auto tr = rollout(r.initial, policy, Decode::sample, stream_seed(seed, i * static_cast<std::size_t>(k) + j));
      if (j == 0 || better(spec, tr.objective, best, 0.0)) best = tr.objective;
    }
    obj[i] = best;
  });
  auto rep = gap_report(task, std::move(obj), std::move(ref));
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

namespace {

std::vector<Trajectory> non_empty(const std::vector<Trajectory>& v) {
  std::vector<Trajectory> out;
  for (const auto& t : v)
    if (!t.actions.empty()) out.push_back(t);
  return out;
}

}  // namespace

template <typename T>
TrainResult<T> train_multitask(Model<T>& model, const std::map<std::string, TaskData>& data, const TrainConfig& cfg,
                               OptimState& optim, const MetricSink& sink) {
  if (data.empty()) throw UsageError("train_multitask: no tasks");
  if (cfg.batch < 1) throw UsageError("train_multitask: batch must be positive");
  std::vector<std::string> tasks;
  std::map<std::string, std::vector<Trajectory>> train;
  std::size_t total = 0;
  for (const auto& [id, d] : data) {
    if (!model.has_task(id)) throw UsageError("train_multitask: task " + id + " is not registered in the model");
    train[id] = non_empty(d.train);
    if (train[id].empty()) throw DataError("train_multitask: empty dataset for task " + id);
    total += train[id].size();
    tasks.push_back(id);
  }
  const int steps = cfg.steps_per_epoch > 0
                        ? cfg.steps_per_epoch
                        : static_cast<int>(std::max<std::size_t>(1, (total + static_cast<std::size_t>(cfg.batch) - 1) /
                                                                          static_cast<std::size_t>(cfg.batch)));
  TrainResult<T> result;
  result.best = model.params();
  result.best_gap = std::numeric_limits<double>::infinity();
  bool validated = false;

  for (int epoch = optim.epoch; epoch < cfg.epochs; ++epoch) {
    const double lr = scheduled_lr(cfg, epoch);
    std::map<std::string, std::pair<double, int>> loss;
    for (int s = 0; s < steps; ++s) {
      Rng rng(stream_seed(cfg.seed, static_cast<std::uint64_t>(optim.step)));
      const auto& task = tasks[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(tasks.size()) - 1))];
      ++result.task_draws[task];
      const auto& pool = train[task];
      std::vector<std::pair<std::size_t, std::size_t>> picks;
      for (int b = 0; b < cfg.batch; ++b) {
        const auto i = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(pool.size()) - 1));
        const auto t = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(pool[i].actions.size()) - 1));
        picks.emplace_back(i, t);
      }
      std::vector<Sample> batch(picks.size());
      parallel_for(picks.size(), [&](std::size_t b) { batch[b] = make_sample(pool[picks[b].first], picks[b].second); });
      const double l = train_step(model, task, batch, optim, cfg, lr);
      loss[task].first += l;
      ++loss[task].second;
    }
    optim.epoch = epoch + 1;
    const bool validate = cfg.validate_every > 0 && (epoch + 1) % cfg.validate_every == 0;
    double gap_sum = 0.0;
    int gap_tasks = 0;
    for (const auto& task : tasks) {
      Metric m;
      m.epoch = epoch;
      m.task = task;
      m.steps = loss[task].second;
      m.loss = m.steps > 0 ? loss[task].first / m.steps : 0.0;
      m.lr = lr;
      m.gap = std::numeric_limits<double>::quiet_NaN();
      const auto& valid = data.at(task).valid;
      if (validate && !valid.empty()) {
        m.gap = evaluate(model, task, valid).mean;
        gap_sum += m.gap;
        ++gap_tasks;
      }
      result.metrics.push_back(m);
      if (sink) sink(m);
    }
    if (gap_tasks > 0) {
      validated = true;
      const double mean = gap_sum / gap_tasks;
      if (mean < result.best_gap) {
        result.best_gap = mean;
        result.best_epoch = epoch;
        result.best = model.params();
      }
    }
  }
  if (!validated) {
    result.best = model.params();
    result.best_epoch = optim.epoch - 1;
    result.best_gap = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

template <typename T>
void finetune_supervised(Model<T>& model, const std::vector<Trajectory>& labeled, const TrainConfig& cfg,
                         OptimState& optim) {
  for (const auto& traj : labeled) {
    const auto& task = traj.initial.task;
    if (!model.has_task(task)) model.register_task(task_spec(task), cfg.seed);
    for (std::size_t t = 0; t < traj.actions.size(); ++t) {
      train_step(model, task, {make_sample(traj, t)}, optim, cfg, cfg.learning_rate);
    }
  }
}

template <typename T>
SelfImproveReport finetune_self_improve(Model<T>& model, const std::string& task, const std::vector<Instance>& instances,
                                        int width, int rounds, const TrainConfig& cfg, OptimState& optim) {
  if (width < 1) throw UsageError("finetune_self_improve: width must be positive");
  if (!model.has_task(task)) model.register_task(task_spec(task), cfg.seed);
  const auto& spec = task_spec(task);
  std::vector<std::optional<Trajectory>> incumbent(instances.size());
  SelfImproveReport report;
  const auto policy = model_policy(model, task);
  for (int r = 0; r < rounds; ++r) {
    std::vector<Trajectory> best(instances.size());
    parallel_for(instances.size(), [&](std::size_t i) {
      for (int k = 0; k < width; ++k) {
        const auto idx = (static_cast<std::uint64_t>(r) * instances.size() + i) * static_cast<std::uint64_t>(width) +
                         static_cast<std::uint64_t>(k);
        auto tr = rollout(instances[i], policy, Decode::sample, stream_seed(cfg.seed ^ 0x5e1fULL, idx));
        if (k == 0 || better(spec, tr.objective, best[i].objective, 0.0)) best[i] = std::move(tr);
      }
    });
    std::vector<double> objectives;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      if (!incumbent[i] || better(spec, best[i].objective, incumbent[i]->objective, 1e-9)) incumbent[i] = best[i];
      objectives.push_back(incumbent[i]->objective);
    }
    double sum = 0.0;
    for (double o : objectives) sum += o;
    report.round_mean.push_back(objectives.empty() ? 0.0 : sum / static_cast<double>(objectives.size()));
    report.incumbents.push_back(std::move(objectives));

    std::vector<std::pair<std::size_t, std::size_t>> items;
    for (std::size_t i = 0; i < incumbent.size(); ++i)
      for (std::size_t t = 0; t < incumbent[i]->actions.size(); ++t) items.emplace_back(i, t);
    Rng rng(stream_seed(cfg.seed, 0x1000000ULL + static_cast<std::uint64_t>(r)));
    rng.shuffle(items);
    const auto bs = static_cast<std::size_t>(std::max(cfg.batch, 1));
    for (std::size_t start = 0; start < items.size(); start += bs) {
      const std::size_t end = std::min(items.size(), start + bs);
      std::vector<Sample> batch(end - start);
      parallel_for(batch.size(), [&](std::size_t b) {
        const auto [i, t] = items[start + b];
        batch[b] = make_sample(*incumbent[i], t);
      });
      train_step(model, task, batch, optim, cfg, cfg.learning_rate);
    }
  }
  return report;
}

#define GENCOP_INSTANTIATE_TRAINER(T)                                                                               \
  template void adamw_update<T>(ParamStore<T>&, OptimState&, const TrainConfig&, double);                          \
  template double train_step<T>(Model<T>&, const std::string&, const std::vector<Sample>&, OptimState&,            \
                                const TrainConfig&, double);                                                        \
  template TrainResult<T> train_multitask<T>(Model<T>&, const std::map<std::string, TaskData>&, const TrainConfig&, \
                                             OptimState&, const MetricSink&);                                       \
  template void finetune_supervised<T>(Model<T>&, const std::vector<Trajectory>&, const TrainConfig&, OptimState&); \
  template SelfImproveReport finetune_self_improve<T>(Model<T>&, const std::string&, const std::vector<Instance>&,  \
                                                      int, int, const TrainConfig&, OptimState&);                   \
  template Policy model_policy<T>(Model<T>&, const std::string&);                                                   \
  template GapReport evaluate<T>(Model<T>&, const std::string&, const std::vector<Trajectory>&, EvalDecode, int,    \
                                 std::uint64_t);

GENCOP_INSTANTIATE_TRAINER(float)
GENCOP_INSTANTIATE_TRAINER(double)

#undef GENCOP_INSTANTIATE_TRAINER

}  // namespace gencop
