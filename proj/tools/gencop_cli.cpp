#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "gencop/error.hpp"
#include "gencop/io.hpp"
#include "gencop/parallel.hpp"

using namespace gencop;
namespace fs = std::filesystem;

namespace {

bool is_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[8] = {};
  in.read(magic, 8);
  return in && std::memcmp(magic, "GENCOPCK", 8) == 0;
}

std::string precision_of(const std::string& ckpt) {
  return read_checkpoint_header(ckpt).manifest.at("precision").get<std::string>();
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path);
  out << j.dump(2) << '\n';
}

// ---- gen

struct GenArgs {
  std::string config, task, out;
  int n = 10, count = 100, machines = 3;
  std::uint64_t seed = 0;
  double capacity = 0.0;
};

int cmd_gen(const GenArgs& a) {
  GenConfig g;
  if (!a.config.empty()) {
    const auto rc = load_run_config(a.config);
    if (rc.tasks.size() != 1) throw UsageError("gen --config needs exactly one task");
    g.task = rc.tasks.front();
    g.n = rc.gen_n;
    g.count = rc.gen_count;
    g.seed = rc.gen_seed;
    g.machines = rc.gen_machines;
    std::cerr << "resolved config: " << run_config_to_json(rc).dump() << '\n';
  } else {
    g.task = a.task;
    g.n = a.n;
    g.count = a.count;
    g.seed = a.seed;
    g.machines = a.machines;
    g.capacity = a.capacity;
  }
  task_spec(g.task);
  if (g.count < 0 || g.n < 1) throw UsageError("gen: n and count must be positive");
  const auto ds = build_dataset(g);
  write_dataset(a.out, ds);
  double sum = 0.0;
  int optimal = 0;
  for (const auto& r : ds.records) {
    sum += r.oracle.objective;
    optimal += r.oracle.optimal ? 1 : 0;
  }
  const double count = static_cast<double>(ds.records.size());
  std::cout << Json{{"task", g.task},
                    {"N", g.n},
                    {"count", ds.records.size()},
                    {"mean_objective", count > 0 ? sum / count : 0.0},
                    {"optimal_fraction", count > 0 ? optimal / count : 0.0},
                    {"out", a.out}}
                   .dump()
            << '\n';
  return 0;
}

// ---- train

std::vector<Trajectory> load_trajectories(const std::string& path, const std::string& task, int limit) {
  auto ds = read_dataset(path);
  const auto header_task = ds.header.at("task").get<std::string>();
  if (header_task != task) throw DataError("dataset " + path + " holds " + header_task + ", expected " + task);
  auto out = ds.trajectories();
  if (limit > 0 && static_cast<int>(out.size()) > limit) out.resize(static_cast<std::size_t>(limit));
  return out;
}

template <typename T>
int run_train(const RunConfig& rc) {
  for (const auto& task : rc.tasks)
    if (!rc.train_datasets.count(task)) throw UsageError("train: no training dataset for task " + task);
  std::map<std::string, TaskData> data;
  for (const auto& task : rc.tasks) {
    data[task].train = load_trajectories(rc.train_datasets.at(task), task, 0);
    if (rc.valid_datasets.count(task))
      data[task].valid = load_trajectories(rc.valid_datasets.at(task), task, rc.valid_limit);
  }
  fs::create_directories(rc.out_dir);
  OptimState optim;
  Model<T> model;
  if (!rc.resume.empty()) {
    model = load_checkpoint<T>(rc.resume, &optim);
  } else {
    model = Model<T>(model_config_for(rc), rc.model_seed);
  }
  for (const auto& task : rc.tasks)
    if (!model.has_task(task)) model.register_task(task_spec(task), rc.model_seed);

  const Json resolved = run_config_to_json(rc);
  std::cerr << "resolved config: " << resolved.dump() << '\n';
  write_json((fs::path(rc.out_dir) / "config.resolved.json").string(), resolved);

  const auto metrics_path = fs::path(rc.out_dir) / rc.metrics;
  std::ofstream metrics(metrics_path, std::ios::app);
  if (!metrics) throw UsageError("cannot open metrics log " + metrics_path.string());
  auto sink = [&](const Metric& m) {
    metrics << metric_to_json(m).dump() << '\n';
    metrics.flush();
    std::cerr << "epoch " << m.epoch << " " << m.task << " loss " << m.loss << " gap " << m.gap << '\n';
  };

  std::map<std::string, TaskData> active;
  for (auto& [task, d] : data) active[task] = d;
  TrainResult<T> result;
  if (rc.train.epochs > optim.epoch) {
    result = train_multitask(model, active, rc.train, optim, sink);
  } else {
    result.best = model.params();
    result.best_epoch = optim.epoch - 1;
    result.best_gap = std::numeric_limits<double>::quiet_NaN();
  }
  const Json extra{{"config", resolved}};
  save_checkpoint((fs::path(rc.out_dir) / "last.ckpt").string(), model, &optim, extra);
  Model<T> best;
  best.adopt(model.config(), result.best, model.tasks());
  Json best_extra = extra;
  best_extra["best_epoch"] = result.best_epoch;
  best_extra["best_gap"] = std::isfinite(result.best_gap) ? Json(result.best_gap) : Json(nullptr);
  save_checkpoint((fs::path(rc.out_dir) / "best.ckpt").string(), best, nullptr, best_extra);
  std::cout << Json{{"out_dir", rc.out_dir}, {"epochs", optim.epoch}, {"steps", optim.step}, {"best_epoch", result.best_epoch},
                    {"best_gap", best_extra["best_gap"]}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_train(const std::string& config) {
  const auto rc = load_run_config(config);
  if (rc.tasks.empty()) throw UsageError("train: config lists no tasks");
  if (rc.precision == "float32") return run_train<float>(rc);
  return run_train<double>(rc);
}

// ---- eval

struct EvalArgs {
  std::string checkpoint, task, dataset, out, decode = "greedy";
  int k = 1, limit = 0;
  std::uint64_t seed = 0;
};

template <typename T>
int run_eval(const EvalArgs& a) {
  auto model = load_checkpoint<T>(a.checkpoint);
  if (!model.has_task(a.task)) throw UsageError("eval: task " + a.task + " is not in the checkpoint");
  const auto refs = load_trajectories(a.dataset, a.task, a.limit);
  if (a.decode != "greedy" && a.decode != "sample") throw UsageError("eval: --decode must be greedy or sample");
  const auto rep =
      evaluate(model, a.task, refs, a.decode == "greedy" ? EvalDecode::greedy : EvalDecode::sample, a.k, a.seed);
  write_gap_csv(a.out + ".csv", rep);
  write_json(a.out + ".json", gap_report_to_json(rep, false));
  std::cout << gap_report_to_json(rep, false).dump() << '\n';
  std::cerr << "eval seconds " << rep.seconds << '\n';
  return 0;
}

int cmd_eval(const EvalArgs& a) {
  return precision_of(a.checkpoint) == "float32" ? run_eval<float>(a) : run_eval<double>(a);
}

// ---- finetune

struct FinetuneArgs {
  std::string checkpoint, task, dataset, out, mode = "supervised", report;
  int labeled = 128, width = 128, rounds = 10, epochs = 1, batch = 32;
  double lr = 5e-4;
  std::uint64_t seed = 0;
  bool reg = false;
};

template <typename T>
int run_finetune(const FinetuneArgs& a) {
  auto model = load_checkpoint<T>(a.checkpoint);
  if (!model.has_task(a.task) && !a.reg)
    throw UsageError("finetune: task " + a.task + " is not in the checkpoint (pass --register)");
  if (!model.has_task(a.task)) model.register_task(task_spec(a.task), a.seed);
  auto ds = read_dataset(a.dataset);
  if (ds.header.at("task").get<std::string>() != a.task) throw DataError("finetune: dataset task mismatch");
  TrainConfig cfg;
  cfg.learning_rate = a.lr;
  cfg.seed = a.seed;
  cfg.batch = a.batch;
  OptimState optim;
  Json report{{"mode", a.mode}, {"task", a.task}};
  const auto refs = ds.trajectories();
  const auto before = evaluate(model, a.task, refs);
  report["gap_before"] = before.mean;
  if (a.mode == "supervised") {
    auto labeled = refs;
    if (static_cast<int>(labeled.size()) > a.labeled) labeled.resize(static_cast<std::size_t>(a.labeled));
    for (int e = 0; e < a.epochs; ++e) finetune_supervised(model, labeled, cfg, optim);
    report["labeled"] = labeled.size();
    report["steps"] = optim.step;
  } else if (a.mode == "self-improve") {
    std::vector<Instance> insts;
    for (const auto& r : ds.records) insts.push_back(r.instance);
    const auto si = finetune_self_improve(model, a.task, insts, a.width, a.rounds, cfg, optim);
    report["width"] = a.width;
    report["rounds"] = a.rounds;
    report["round_mean"] = si.round_mean;
    report["incumbents"] = si.incumbents;
  } else {
    throw UsageError("finetune: --mode must be supervised or self-improve");
  }
  const auto after = evaluate(model, a.task, refs);
  report["gap_after"] = after.mean;
  save_checkpoint(a.out, model, &optim, Json{{"finetune", report.at("mode")}});
  if (!a.report.empty()) write_json(a.report, report);
  std::cout << Json{{"mode", a.mode}, {"gap_before", before.mean}, {"gap_after", after.mean}, {"out", a.out}}.dump()
            << '\n';
  return 0;
}

int cmd_finetune(const FinetuneArgs& a) {
  return precision_of(a.checkpoint) == "float32" ? run_finetune<float>(a) : run_finetune<double>(a);
}

// ---- inspect

int cmd_inspect(const std::string& path) {
  if (is_checkpoint(path)) {
    auto h = read_checkpoint_header(path);
    Json m = h.manifest;
    m.erase("tensors");
    Json census;
    for (const auto& t : h.manifest.at("tensors")) census[t.at("name").get<std::string>()] = t.at("shape");
    m["tensor_shapes"] = census;
    std::cout << m.dump(2) << '\n';
  } else {
    std::cout << read_dataset_header(path).dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gencop: datasets, training and evaluation"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "generate, solve and write a dataset");
  g->add_option("--config", gen.config, "run config (uses tasks[0] and gen_* keys)");
  g->add_option("--task", gen.task, "task id");
  g->add_option("--n", gen.n, "instance size");
  g->add_option("--count", gen.count, "instances");
  g->add_option("--seed", gen.seed, "seed");
  g->add_option("--machines", gen.machines, "machines for shop tasks");
  g->add_option("--capacity", gen.capacity, "capacity override (cvrp/kp)");
  g->add_option("--out", gen.out, "output path")->required();

  std::string train_config;
  auto* t = app.add_subcommand("train", "multi-task imitation training");
  t->add_option("--config", train_config, "run config")->required()->check(CLI::ExistingFile);

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "gap report of a checkpoint");
  e->add_option("--checkpoint", ev.checkpoint)->required()->check(CLI::ExistingFile);
  e->add_option("--task", ev.task)->required();
  e->add_option("--dataset", ev.dataset)->required()->check(CLI::ExistingFile);
  e->add_option("--out", ev.out, "report prefix (.csv and .json)")->required();
  e->add_option("--decode", ev.decode, "greedy | sample");
  e->add_option("--k", ev.k, "samples per instance");
  e->add_option("--seed", ev.seed);
  e->add_option("--limit", ev.limit, "first N instances, 0 for all");

  FinetuneArgs ft;
  auto* f = app.add_subcommand("finetune", "adapt a checkpoint to a task");
  f->add_option("--checkpoint", ft.checkpoint)->required()->check(CLI::ExistingFile);
  f->add_option("--task", ft.task)->required();
  f->add_option("--dataset", ft.dataset)->required()->check(CLI::ExistingFile);
  f->add_option("--out", ft.out, "tuned checkpoint")->required();
  f->add_option("--mode", ft.mode, "supervised | self-improve");
  f->add_option("--labeled", ft.labeled, "labeled instances (supervised)");
  f->add_option("--epochs", ft.epochs, "passes over the labeled set (supervised)");
  f->add_option("--width", ft.width, "sampled rollouts per instance (self-improve)");
  f->add_option("--rounds", ft.rounds, "rounds (self-improve)");
  f->add_option("--batch", ft.batch, "batch size (self-improve)");
  f->add_option("--lr", ft.lr);
  f->add_option("--seed", ft.seed);
  f->add_option("--report", ft.report, "JSON report path");
  f->add_flag("--register", ft.reg, "add an adapter when the task is new");

  std::string inspect_path;
  auto* in = app.add_subcommand("inspect", "print a checkpoint manifest or dataset header");
  in->add_option("path", inspect_path)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : 1;
  }

  try {
    std::cerr << "workers " << worker_count() << '\n';
    if (*g) {
      if (gen.config.empty() && gen.task.empty()) throw UsageError("gen: --task or --config required");
      return cmd_gen(gen);
    }
    if (*t) return cmd_train(train_config);
    if (*e) return cmd_eval(ev);
    if (*f) return cmd_finetune(ft);
    if (*in) return cmd_inspect(inspect_path);
  } catch (const UsageError& err) {
    std::cerr << "usage error: " << err.what() << '\n';
    return 1;
  } catch (const NumericalError& err) {
    std::cerr << "numerical abort: " << err.what() << '\n';
    return 3;
  } catch (const DataError& err) {
    std::cerr << "data error: " << err.what() << '\n';
    return 2;
  } catch (const ShapeError& err) {
    std::cerr << "shape error: " << err.what() << '\n';
    return 2;
  } catch (const Json::exception& err) {
    std::cerr << "data error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  }
  return 1;
}
