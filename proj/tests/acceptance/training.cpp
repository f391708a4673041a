#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include "common.hpp"
#include "gencop/io.hpp"
#include "gencop/parallel.hpp"

namespace gencop::acceptance {
namespace {

namespace fs = std::filesystem;
using Real = float;

// Regression thresholds.
constexpr double kAtspGap = 0.05;
constexpr double kKpGap = 0.02;
constexpr double kMvcGap = 0.05;
constexpr double kJointSlack = 0.02;
constexpr double kAtspSeconds = 1800.0;
constexpr double kFinetuneSeconds = 600.0;

constexpr int kValid = 100;
constexpr int kTest = 200;

struct Budget {
  std::string task;
  int n;
  int trajectories;
  int epochs;
  int batch;
  double lr;
};

// Single-task budgets; the joint run gets the summed optimizer steps.
const std::vector<Budget>& budgets() {
  static const std::vector<Budget> b = {
      {"atsp", 10, 50000, 10, 32, 5e-4},
      {"kp", 20, 10000, 4, 32, 5e-4},
      {"mvc", 14, 10000, 4, 32, 5e-4},
  };
  return b;
}

fs::path artifacts() {
  const auto dir = fs::current_path() / "acceptance_artifacts";
  fs::create_directories(dir);
  return dir;
}

std::vector<Trajectory> oracle_set(const std::string& task, int n, int count, std::uint64_t seed) {
  GenConfig g;
  g.task = task;
  g.n = n;
  g.count = count;
  g.seed = seed;
  const auto insts = generate(g);
  std::vector<Trajectory> out(insts.size());
  parallel_for(insts.size(), [&](std::size_t i) { out[i] = trajectory_from_solution(insts[i], solve(insts[i])); });
  return out;
}

struct Split {
  TaskData data;
  std::vector<Trajectory> test;
};

const Split& split(const Budget& b) {
  static std::map<std::string, Split> cache;
  auto it = cache.find(b.task);
  if (it != cache.end()) return it->second;
  Split s;
  s.data.train = oracle_set(b.task, b.n, b.trajectories, 1000);
  s.data.valid = oracle_set(b.task, b.n, kValid, 2000);
  s.test = oracle_set(b.task, b.n, kTest, 3000);
  return cache.emplace(b.task, std::move(s)).first->second;
}

int steps_per_epoch(const Budget& b) { return (b.trajectories + b.batch - 1) / b.batch; }

Model<Real> fresh_model(const std::vector<std::string>& tasks) {
  Model<Real> m(ModelConfig{}, 1);
  for (const auto& t : tasks) m.register_task(task_spec(t), 1);
  return m;
}

void adopt_best(Model<Real>& m, const TrainResult<Real>& r) { m.adopt(m.config(), r.best, m.tasks()); }

double test_gap(Model<Real>& m, const std::string& task, const std::vector<Trajectory>& test) {
  return evaluate(m, task, test).mean;
}

// ---------------------------------------------------------------- 8

struct SingleResult {
  double gap = 0.0, seconds = 0.0, heuristic = 0.0;
};

std::map<std::string, SingleResult> load_single() {
  std::map<std::string, SingleResult> out;
  std::ifstream in(artifacts() / "single_task.json");
  if (!in) return out;
  const auto j = Json::parse(in);
  for (const auto& [task, v] : j.items())
    out[task] = {v.at("gap").get<double>(), v.at("seconds").get<double>(), v.at("heuristic").get<double>()};
  return out;
}

void save_single(const std::map<std::string, SingleResult>& r) {
  Json j;
  for (const auto& [task, v] : r) j[task] = Json{{"gap", v.gap}, {"seconds", v.seconds}, {"heuristic", v.heuristic}};
  std::ofstream(artifacts() / "single_task.json") << j.dump(2) << '\n';
}

std::map<std::string, SingleResult> run_single() {
  std::map<std::string, SingleResult> res;
  for (const auto& b : budgets()) {
    const auto& s = split(b);
    auto model = fresh_model({b.task});
    TrainConfig cfg;
    cfg.learning_rate = b.lr;
    cfg.batch = b.batch;
    cfg.epochs = b.epochs;
    cfg.seed = 7;
    OptimState st;
    Stopwatch clock;
    const auto r = train_multitask(model, {{b.task, s.data}}, cfg, st);
    const double secs = clock.seconds();
    adopt_best(model, r);
    std::vector<double> heur, ref;
    for (const auto& t : s.test) {
      heur.push_back(solve_heuristic(t.initial).objective);
      ref.push_back(t.objective);
    }
    res[b.task] = {test_gap(model, b.task, s.test), secs, gap_report(b.task, heur, ref).mean};
    save_checkpoint((artifacts() / (b.task + "_single.ckpt")).string(), model);
  }
  save_single(res);
  return res;
}

Outcome criterion_single_task() {
  const auto r = run_single();
  const auto& a = r.at("atsp");
  const auto& k = r.at("kp");
  const auto& m = r.at("mvc");
  const bool atsp_ok = a.gap < kAtspGap && a.gap < a.heuristic && a.seconds <= kAtspSeconds;
  const bool pass = atsp_ok && k.gap < kKpGap && m.gap < kMvcGap;
  return {pass, cat("ATSP10 gap ", a.gap * 100, "% vs NN+2opt ", a.heuristic * 100, "% (need <5% and below) in ",
                    a.seconds, " s; KP20 gap ", k.gap * 100, "% (need <2%) in ", k.seconds, " s; MVC14 gap ",
                    m.gap * 100, "% (need <5%) in ", m.seconds, " s; test sets of ", kTest)};
}

// ---------------------------------------------------------------- 9

fs::path joint_checkpoint() { return artifacts() / "joint.ckpt"; }

Outcome criterion_joint() {
  auto single = load_single();
  if (single.size() < budgets().size()) single = run_single();
  std::map<std::string, TaskData> data;
  std::vector<std::string> tasks;
  int total_steps = 0, max_epochs = 1;
  for (const auto& b : budgets()) {
    data[b.task] = split(b).data;
    tasks.push_back(b.task);
    total_steps += steps_per_epoch(b) * b.epochs;
    max_epochs = std::max(max_epochs, b.epochs);
  }
  auto model = fresh_model(tasks);
  TrainConfig cfg;
  cfg.learning_rate = budgets().front().lr;
  cfg.batch = budgets().front().batch;
  cfg.epochs = max_epochs;
  cfg.steps_per_epoch = (total_steps + max_epochs - 1) / max_epochs;
  cfg.seed = 7;
  OptimState st;
  Stopwatch clock;
  const auto r = train_multitask(model, data, cfg, st);
  const double secs = clock.seconds();
  adopt_best(model, r);
  save_checkpoint(joint_checkpoint().string(), model);
  bool pass = true;
  std::string detail = cat(st.step, " joint steps in ", secs, " s; ");
  for (const auto& b : budgets()) {
    const double g = test_gap(model, b.task, split(b).test);
    const double s = single.at(b.task).gap;
    pass = pass && g <= s + kJointSlack;
    detail += cat(b.task, " ", g * 100, "% vs single ", s * 100, "% (", r.task_draws.at(b.task), " draws); ");
  }
  return {pass, detail + "allowed +2 pp"};
}

Model<Real> load_joint() {
  if (!fs::exists(joint_checkpoint())) {
    const auto o = criterion_joint();
    (void)o;
  }
  return load_checkpoint<Real>(joint_checkpoint().string());
}

// ---------------------------------------------------------------- 10

Outcome criterion_supervised_finetune() {
  const int labeled_count = 128;
  const auto labeled = oracle_set("trp", 10, labeled_count, 4000);
  const auto test = oracle_set("trp", 10, kTest, 4001);
  auto base = load_joint();
  Stopwatch clock;
  TrainConfig cfg;
  cfg.seed = 3;

  auto zero_shot = base;
  zero_shot.register_task(task_spec("trp"), cfg.seed);
  const double zero_gap = test_gap(zero_shot, "trp", test);

  auto tuned = base;
  OptimState st;
  finetune_supervised(tuned, labeled, cfg, st);
  const double tuned_gap = test_gap(tuned, "trp", test);
  const double secs = clock.seconds();

  // from scratch: same instances, same number of single-sample steps
  auto scratch = fresh_model({});
  OptimState sst;
  finetune_supervised(scratch, labeled, cfg, sst);
  const double scratch_gap = test_gap(scratch, "trp", test);

  const bool pass = tuned_gap < zero_gap && tuned_gap < scratch_gap && secs < kFinetuneSeconds;
  return {pass, cat("TRP10 fine-tuned gap ", tuned_gap * 100, "% vs zero-shot ", zero_gap * 100, "% and scratch ",
                    scratch_gap * 100, "% (", st.step, " steps each); fine-tune wall clock ", secs, " s (limit 600 s)")};
}

// ---------------------------------------------------------------- 11

Outcome criterion_self_improve() {
  const int rounds = 6, width = 32, count = 64;
  GenConfig g;
  g.task = "pctsp";
  g.n = 10;
  g.count = count;
  g.seed = 5000;
  const auto unlabeled = generate(g);
  const auto test = oracle_set("pctsp", 10, kTest, 5001);
  auto model = load_joint();
  TrainConfig cfg;
  cfg.seed = 11;
  cfg.batch = 32;
  model.register_task(task_spec("pctsp"), cfg.seed);
  const double zero_gap = test_gap(model, "pctsp", test);
  OptimState st;
  const auto rep = finetune_self_improve(model, "pctsp", unlabeled, width, rounds, cfg, st);
  bool monotone = true;
  for (std::size_t r = 1; r < rep.incumbents.size(); ++r)
    for (std::size_t i = 0; i < rep.incumbents[r].size(); ++i)
      monotone = monotone && rep.incumbents[r][i] <= rep.incumbents[r - 1][i];
  const double final_gap = test_gap(model, "pctsp", test);
  std::string means;
  for (double m : rep.round_mean) means += cat(m, " ");
  return {monotone && final_gap < zero_gap,
          cat("PCTSP10 ", rounds, " rounds x width ", width, " on ", count, " instances; incumbents non-worsening: ",
              monotone ? "yes" : "no", "; round means ", means, "; greedy gap ", final_gap * 100, "% vs zero-shot ",
              zero_gap * 100, "%")};
}

}  // namespace

std::vector<Criterion> training_criteria() {
  return {{8, "single-task training", criterion_single_task},
          {9, "multi-task training", criterion_joint},
          {10, "supervised fine-tuning", criterion_supervised_finetune},
          {11, "self-improvement fine-tuning", criterion_self_improve}};
}

}  // namespace gencop::acceptance
