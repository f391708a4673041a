#include <cmath>
#include <fstream>
#include <set>

#include "gencop/error.hpp"
#include "gencop/io.hpp"

namespace gencop {
namespace {

template <typename V>
void take(const Json& j, const char* key, V& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<V>();
  } catch (const Json::exception& e) {
    throw UsageError(std::string("config key '") + key + "': " + e.what());
  }
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "preset",         "precision",      "codebook_bypass", "attention",   "tasks",        "train_datasets",
      "valid_datasets", "valid_limit",    "out_dir",         "resume",      "metrics",      "model_seed",
      "learning_rate",  "decay",          "decay_every",     "batch",       "epochs",       "steps_per_epoch",
      "weight_decay",   "beta1",          "beta2",           "adam_eps",    "seed",         "freeze_backbone",
      "validate_every", "gen_n",          "gen_count",       "gen_seed",    "gen_machines"};
  return keys;
}

}  // namespace

RunConfig parse_run_config(const Json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known_keys().count(key)) throw UsageError("unknown config key '" + key + "'");
  }
  RunConfig c;
  take(j, "preset", c.preset);
  take(j, "precision", c.precision);
  take(j, "codebook_bypass", c.codebook_bypass);
  take(j, "attention", c.attention);
  take(j, "tasks", c.tasks);
  take(j, "train_datasets", c.train_datasets);
  take(j, "valid_datasets", c.valid_datasets);
  take(j, "valid_limit", c.valid_limit);
  take(j, "out_dir", c.out_dir);
  take(j, "resume", c.resume);
  take(j, "metrics", c.metrics);
  take(j, "model_seed", c.model_seed);
  auto& t = c.train;
  take(j, "learning_rate", t.learning_rate);
  take(j, "decay", t.decay);
  take(j, "decay_every", t.decay_every);
  take(j, "batch", t.batch);
  take(j, "epochs", t.epochs);
  take(j, "steps_per_epoch", t.steps_per_epoch);
  take(j, "weight_decay", t.weight_decay);
  take(j, "beta1", t.beta1);
  take(j, "beta2", t.beta2);
  take(j, "adam_eps", t.adam_eps);
  take(j, "seed", t.seed);
  take(j, "freeze_backbone", t.freeze_backbone);
  take(j, "validate_every", t.validate_every);
  take(j, "gen_n", c.gen_n);
  take(j, "gen_count", c.gen_count);
  take(j, "gen_seed", c.gen_seed);
  take(j, "gen_machines", c.gen_machines);

  if (c.preset != "desk" && c.preset != "paper") throw UsageError("preset must be desk or paper");
  if (c.precision != "float64" && c.precision != "float32") throw UsageError("precision must be float64 or float32");
  if (c.attention != "mixed" && c.attention != "vanilla") throw UsageError("attention must be mixed or vanilla");
  if (t.batch < 1 || t.epochs < 0 || t.decay_every < 1 || t.steps_per_epoch < 0 || t.validate_every < 0)
    throw UsageError("batch, epochs, decay_every, steps_per_epoch or validate_every out of range");
  if (!(t.learning_rate >= 0.0) || !(t.decay > 0.0)) throw UsageError("learning_rate/decay out of range");
  for (const auto& task : c.tasks) task_spec(task);
  if (c.tasks.empty()) {
    for (const auto& [task, path] : c.train_datasets) c.tasks.push_back(task);
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  return parse_run_config(j);
}

Json run_config_to_json(const RunConfig& c) {
  const auto& t = c.train;
  return Json{{"preset", c.preset},
              {"precision", c.precision},
              {"codebook_bypass", c.codebook_bypass},
              {"attention", c.attention},
              {"tasks", c.tasks},
              {"train_datasets", c.train_datasets},
              {"valid_datasets", c.valid_datasets},
              {"valid_limit", c.valid_limit},
              {"out_dir", c.out_dir},
              {"resume", c.resume},
              {"metrics", c.metrics},
              {"model_seed", c.model_seed},
              {"learning_rate", t.learning_rate},
              {"decay", t.decay},
              {"decay_every", t.decay_every},
              {"batch", t.batch},
              {"epochs", t.epochs},
              {"steps_per_epoch", t.steps_per_epoch},
              {"weight_decay", t.weight_decay},
              {"beta1", t.beta1},
              {"beta2", t.beta2},
              {"adam_eps", t.adam_eps},
              {"seed", t.seed},
              {"freeze_backbone", t.freeze_backbone},
              {"validate_every", t.validate_every},
              {"gen_n", c.gen_n},
              {"gen_count", c.gen_count},
              {"gen_seed", c.gen_seed},
              {"gen_machines", c.gen_machines}};
}

ModelConfig model_config_for(const RunConfig& c) {
  ModelConfig m;
  m.backbone = c.preset == "paper" ? BackboneConfig::paper() : BackboneConfig::desk();
  m.codebook.bypass = c.codebook_bypass;
  m.attention.mode = c.attention == "vanilla" ? AttentionMode::vanilla : AttentionMode::mixed;
  return m;
}

Json metric_to_json(const Metric& m) {
  Json j{{"epoch", m.epoch}, {"task", m.task}, {"loss", m.loss}, {"steps", m.steps}, {"lr", m.lr}};
  j["gap"] = std::isfinite(m.gap) ? Json(m.gap) : Json(nullptr);
  return j;
}

Json gap_report_to_json(const GapReport& r, bool rows) {
  Json j{{"task", r.task}, {"count", r.gaps.size()}, {"mean", r.mean}, {"p50", r.p50}, {"p90", r.p90}, {"worst", r.worst}};
  if (rows) {
    Json items = Json::array();
    for (std::size_t i = 0; i < r.gaps.size(); ++i)
      items.push_back(Json{{"index", i}, {"objective", r.objective[i]}, {"reference", r.reference[i]}, {"gap", r.gaps[i]}});
    j["instances"] = items;
  }
  return j;
}

void write_gap_csv(const std::string& path, const GapReport& r) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path);
  out.precision(17);
  out << "index,objective,reference,gap\n";
  for (std::size_t i = 0; i < r.gaps.size(); ++i)
    out << i << ',' << r.objective[i] << ',' << r.reference[i] << ',' << r.gaps[i] << '\n';
}

}  // namespace gencop
