#include <Eigen/SVD>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>

#include "common.hpp"
#include "gencop/gradcheck.hpp"
#include "gencop/io.hpp"
#include "gencop/ops.hpp"
#include "gencop/parallel.hpp"
#include "../support.hpp"

namespace gencop::acceptance {
namespace {

namespace fs = std::filesystem;
using test::random_values;

constexpr double kGradTol = 1e-4;
constexpr double kEquivTol = 1e-6;
constexpr double kRankTol = 1e-6;
constexpr double kReplayTol = 1e-9;

// ---------------------------------------------------------------- 1

struct Leaves {
  ParamStore<double> store;
  Rng rng{31};
  Tensor<double>& add(const std::string& name, Shape s) {
    auto& t = store.add(name, s);
    t.values = random_values(rng, t.size());
    return t;
  }
};

Var weighted(Tape<double>& t, Var y, std::uint64_t seed) {
  Rng w(seed);
  return ops::reduce_sum(t, ops::elementwise_mul(t, y, t.constant(t.shape(y), random_values(w, numel(t.shape(y))))));
}

double op_suite(int& checks) {
  double worst = 0.0;
  Rng shapes(3);
  for (int rep = 0; rep < 10; ++rep) {
    const auto n = static_cast<std::size_t>(shapes.integer(1, 6));
    const auto k = static_cast<std::size_t>(shapes.integer(1, 6));
    const auto m = static_cast<std::size_t>(shapes.integer(1, 6));
    Leaves c;
    auto& a = c.add("a", {n, k});
    auto& b = c.add("b", {k, m});
    auto& a2 = c.add("a2", {n, k});
    auto& s = c.add("s", {1});
    std::vector<double> mask(n * k, 0.0);
    for (std::size_t i = 0; i < n * k; ++i)
      if (i % k != 0 && shapes.uniform() < 0.3) mask[i] = -std::numeric_limits<double>::infinity();
    std::vector<int> rows;
    for (std::size_t i = 0; i < n + 2; ++i) rows.push_back(static_cast<int>(shapes.integer(0, static_cast<std::int64_t>(n) - 1)));
    std::vector<int> targets{0};
    if (k > 1 && mask[1] == 0.0) targets.push_back(1);
    const std::vector<std::function<Var(Tape<double>&)>> cases = {
        [&](Tape<double>& t) { return weighted(t, ops::matmul(t, t.param(a), t.param(b)), 1); },
        [&](Tape<double>& t) { return weighted(t, ops::add(t, t.param(a), t.param(a2)), 2); },
        [&](Tape<double>& t) { return weighted(t, ops::scale(t, t.param(a), 0.7), 3); },
        [&](Tape<double>& t) { return weighted(t, ops::scale(t, t.param(a), t.param(s)), 4); },
        [&](Tape<double>& t) { return weighted(t, ops::elementwise_mul(t, t.param(a), t.param(a2)), 5); },
        [&](Tape<double>& t) { return weighted(t, ops::relu(t, t.param(a)), 6); },
        [&](Tape<double>& t) { return weighted(t, ops::concat_last_dim(t, t.param(a), t.param(a2)), 7); },
        [&](Tape<double>& t) { return weighted(t, ops::reshape(t, t.param(a), {k, n}), 8); },
        [&](Tape<double>& t) { return weighted(t, ops::softmax_over_flat(t, t.param(a), std::span<const double>(mask)), 9); },
        [&](Tape<double>& t) { return weighted(t, ops::masked_softmax(t, t.param(a), std::span<const double>(mask)), 10); },
        [&](Tape<double>& t) { return weighted(t, ops::gather_rows(t, t.param(a), std::span<const int>(rows)), 11); },
        [&](Tape<double>& t) {
          return ops::set_nll(t, t.param(a), std::span<const double>(mask), std::span<const int>(targets));
        },
    };
    for (const auto& f : cases) {
      worst = std::max(worst, finite_diff_check(f, c.store, 1e-6).max_rel_error);
      ++checks;
    }
  }
  return worst;
}

// Environment states of every task at N <= 6, a fresh state and one mid-way.
std::vector<std::pair<Instance, std::vector<int>>> gradient_states(const std::string& task) {
  GenConfig g;
  g.task = task;
  g.count = 1;
  g.seed = 23;
  g.machines = 2;
  g.n = task == "jssp" || task == "ossp" ? 2 : task == "umsp" ? 4 : 6;
  const auto inst = generate(g).front();
  if (inst.n > 6) throw std::runtime_error("gradient instance too large for " + task);
  const auto traj = trajectory_from_solution(inst, solve(inst));
  std::vector<std::pair<Instance, std::vector<int>>> out;
  for (std::size_t t : {std::size_t{0}, traj.actions.size() / 2}) {
    auto sfx = suffix_state(traj, t);
    out.emplace_back(sfx.state, sfx.targets);
  }
  return out;
}

Outcome criterion_gradients() {
  Stopwatch clock;
  int checks = 0;
  const double ops_worst = op_suite(checks);

  ModelConfig cfg;
  cfg.backbone = test::tiny_backbone();
  Model<double> model(cfg, 7);
  for (const auto& task : task_ids()) model.register_task(task_spec(task), 7);
  Rng rng(4);
  test::randomize(model.params(), rng, 0.85);
  Model<long double> wide(cfg, 7);
  for (const auto& task : task_ids()) wide.register_task(task_spec(task), 7);
  double e2e_worst = 0.0;
  std::string worst_task, failing;
  for (const auto& task : task_ids()) {
    for (const auto& [state, targets] : gradient_states(task)) {
      const auto in = model_input(state);
      const auto r = finite_diff_check(
          [&](Tape<double>& t) { return model.loss(t, task, in, std::span<const int>(targets)); }, model.params(),
          [&](Tape<long double>& t) { return wide.loss(t, task, in, std::span<const int>(targets)); }, wide.params());
      ++checks;
      if (r.max_rel_error >= kGradTol) failing += cat(task, "/", r.worst_param, "[", r.worst_index, "] ", r.max_rel_error, " a=", r.worst_analytic, " n=", r.worst_numeric, "; ");
      if (r.max_rel_error >= e2e_worst) {
        e2e_worst = r.max_rel_error;
        worst_task = task + " (" + r.worst_param + ")";
      }
    }
  }
  const double secs = clock.seconds();
  const bool pass = ops_worst < kGradTol && e2e_worst < kGradTol && secs < 120.0;
  return {pass, cat(checks, " checks; ops worst rel ", ops_worst, ", end-to-end worst rel ", e2e_worst, " at ",
                    worst_task, "; ", secs, " s (limits 1e-4, 120 s)", failing.empty() ? "" : "; failing: " + failing)};
}

// ---------------------------------------------------------------- 2

Outcome criterion_vanilla_reduction() {
  Rng rng(12);
  int equal = 0;
  const int cases = 1000;
  for (int rep = 0; rep < cases; ++rep) {
    const auto N = static_cast<std::size_t>(rng.integer(1, 7)), M = static_cast<std::size_t>(rng.integer(1, 7));
    const int H = static_cast<int>(rng.integer(1, 4));
    const std::size_t D = static_cast<std::size_t>(H) * static_cast<std::size_t>(rng.integer(1, 4));
    const auto E = static_cast<std::size_t>(rng.integer(1, 5));
    ParamStore<double> store;
    for (const char* n : {"WQ", "WK", "WV", "WO"}) store.add(n, {D, D}).values = random_values(rng, D * D);
    store.add("WQe", {E, D});
    store.add("WKe", {E, D});
    Tape<double> t;
    HeadParams p{t.param(store.at("WQ")), t.param(store.at("WK")), t.param(store.at("WV")), t.param(store.at("WO")),
                 t.param(store.at("WQe")), t.param(store.at("WKe")), H};
    std::vector<double> mask;
    if (rng.uniform() < 0.5) {
      mask.assign(M * N, 0.0);
      for (std::size_t i = 0; i < M * N; ++i)
        if (i / N != 0 && rng.uniform() < 0.3) mask[i] = -std::numeric_limits<double>::infinity();
    }
    const auto q = random_values(rng, N * D), k = random_values(rng, M * D);
    EdgeEmbedding ee{t.constant({M, N, E}, random_values(rng, M * N * E)), Var{}};
    AttentionInputs<double> in{t.constant({N, D}, q), t.constant({M, D}, k), t.constant({M, D}, k), &ee, mask};
    const auto a = t.value(attention_forward(t, in, p, {AttentionMode::mixed, true}));
    const auto b = t.value(attention_forward(t, in, p, {AttentionMode::vanilla, true}));
    if (std::equal(a.begin(), a.end(), b.begin(), b.end())) ++equal;
  }
  return {equal == cases, cat(equal, "/", cases, " random cases bitwise equal")};
}

// ---------------------------------------------------------------- 3

std::vector<double> values(const Tape<double>& t, Var v) {
  auto s = t.value(v);
  return {s.begin(), s.end()};
}

std::vector<std::vector<double>> typed_run(Model<double>& m, const TypeGraphConfig& g,
                                           const std::vector<std::vector<double>>& x,
                                           const std::vector<std::vector<double>>& e, std::size_t d, std::size_t r,
                                           const std::vector<double>& lift) {
  Tape<double> t(false);
  TypedEmbeddings emb;
  std::vector<std::size_t> rows;
  for (const auto& v : x) {
    rows.push_back(v.size() / d);
    emb.nodes.push_back(t.constant({v.size() / d, d}, v));
  }
  for (std::size_t i = 0; i < g.pairs.size(); ++i) {
    EdgeEmbedding ee;
    if (g.pairs[i].edges) {
      ee.codes = t.constant({rows[static_cast<std::size_t>(g.pairs[i].source)], rows[static_cast<std::size_t>(g.pairs[i].target)], r}, e[i]);
      ee.lift = t.constant({r, lift.size() / r}, lift);
    }
    emb.pairs.push_back(ee);
  }
  auto layers = bind_backbone(t, m.params(), m.config().backbone);
  auto out = typed_backbone_forward(t, emb, g, std::span<const LayerParams>(layers), m.config().attention);
  std::vector<std::vector<double>> res;
  for (Var v : out.nodes) res.push_back(values(t, v));
  return res;
}

// One case: random embeddings, a random permutation inside every type.
double equivariance_case(Model<double>& m, const TypeGraphConfig& g, Rng& rng) {
  const std::size_t d = static_cast<std::size_t>(m.config().backbone.dim), r = 3;
  const std::size_t types = g.types.size();
  std::vector<std::size_t> rows(types);
  for (auto& n : rows) n = static_cast<std::size_t>(rng.integer(1, 5));
  std::vector<std::vector<std::size_t>> perm(types);
  std::vector<std::vector<double>> x(types), px(types);
  for (std::size_t ty = 0; ty < types; ++ty) {
    perm[ty].resize(rows[ty]);
    for (std::size_t i = 0; i < rows[ty]; ++i) perm[ty][i] = i;
    rng.shuffle(perm[ty]);
    x[ty] = random_values(rng, rows[ty] * d);
    px[ty] = x[ty];
    for (std::size_t i = 0; i < rows[ty]; ++i)
      for (std::size_t c = 0; c < d; ++c) px[ty][i * d + c] = x[ty][perm[ty][i] * d + c];
  }
  std::vector<std::vector<double>> e(g.pairs.size()), pe(g.pairs.size());
  for (std::size_t p = 0; p < g.pairs.size(); ++p) {
    if (!g.pairs[p].edges) continue;
    const auto s = static_cast<std::size_t>(g.pairs[p].source), tg = static_cast<std::size_t>(g.pairs[p].target);
    e[p] = random_values(rng, rows[s] * rows[tg] * r);
    pe[p] = e[p];
    for (std::size_t i = 0; i < rows[s]; ++i)
      for (std::size_t j = 0; j < rows[tg]; ++j)
        for (std::size_t c = 0; c < r; ++c)
          pe[p][(i * rows[tg] + j) * r + c] = e[p][(perm[s][i] * rows[tg] + perm[tg][j]) * r + c];
  }
  const auto lift = random_values(rng, r * static_cast<std::size_t>(m.config().backbone.edge_dim));
  const auto a = typed_run(m, g, x, e, d, r, lift);
  const auto b = typed_run(m, g, px, pe, d, r, lift);
  double worst = 0.0;
  for (std::size_t ty = 0; ty < types; ++ty)
    for (std::size_t i = 0; i < rows[ty]; ++i)
      for (std::size_t c = 0; c < d; ++c)
        worst = std::max(worst, std::abs(b[ty][i * d + c] - a[ty][perm[ty][i] * d + c]));
  return worst;
}

Outcome criterion_equivariance() {
  Model<double> m(ModelConfig{}, 5);
  Rng rng(6);
  test::randomize(m.params(), rng, 0.3);
  const std::vector<TypeGraphConfig> graphs = {TypeGraphConfig::single_type(true), TypeGraphConfig::job_shop(),
                                               TypeGraphConfig::unrelated_machines()};
  double worst = 0.0;
  int cases = 0;
  for (int rep = 0; rep < 500; ++rep) {
    // half single-type, half typed
    const auto& g = rep % 2 == 0 ? graphs[0] : graphs[1 + static_cast<std::size_t>((rep / 2) % 2)];
    worst = std::max(worst, equivariance_case(m, g, rng));
    ++cases;
  }
  return {worst < kEquivTol, cat(cases, " cases (250 single-type, 250 typed), worst deviation ", worst, " (limit 1e-6)")};
}

// ---------------------------------------------------------------- 4

Outcome criterion_census() {
  bool equal = true;
  std::string detail;
  for (const auto& preset : {BackboneConfig::desk(), BackboneConfig::paper()}) {
    ModelConfig cfg;
    cfg.backbone = preset;
    Model<float> single(cfg, 1), shop(cfg, 1), machines(cfg, 1);
    single.register_task(task_spec("atsp"), 1);
    shop.register_task(task_spec("jssp"), 1);
    machines.register_task(task_spec("umsp"), 1);
    auto shared = [](const Model<float>& m) { return m.params().count("layer.") + m.params().count("codebook."); };
    equal = equal && shared(single) == shared(shop) && shared(single) == shared(machines);
    detail += cat("L=", preset.layers, " shared ", shared(single), "/", shared(shop), "/", shared(machines), "; ");
  }
  ModelConfig paper;
  paper.backbone = BackboneConfig::paper();
  Model<float> m(paper, 1);
  for (const auto& task : task_ids()) m.register_task(task_spec(task), 1);
  const auto total = m.params().count();
  const bool in_band = total >= 1890000 && total <= 2310000;
  detail += cat("paper preset with all ", task_ids().size(), " adapters: ", total, " parameters (band 1.89M-2.31M)");
  return {equal && in_band, detail};
}

// ---------------------------------------------------------------- 5

Eigen::VectorXd singular_values(const std::vector<double>& m, std::size_t rows, std::size_t cols) {
  Eigen::MatrixXd a(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i * cols + j];
  return Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();
}

// Largest singular value past index `bound` (0 when there is none).
double tail(const Eigen::VectorXd& sv, std::size_t bound) {
  double w = 0.0;
  for (auto i = static_cast<Eigen::Index>(bound); i < sv.size(); ++i) w = std::max(w, sv(i));
  return w;
}

std::size_t rank_of(const Eigen::VectorXd& sv) {
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) r += sv(i) >= kRankTol ? 1 : 0;
  return r;
}

Outcome criterion_codebook_rank() {
  TaskSpec wide;
  wide.id = "wide";
  wide.node_features = {12};
  wide.edge_features = {6};
  wide.graph = TypeGraphConfig::single_type(true);
  double worst_tail = 0.0;
  bool bounded = true, bypass_full = true;
  int maps = 0;
  for (bool bypass : {false, true}) {
    ModelConfig cfg;
    cfg.codebook.bypass = bypass;
    Model<double> m(cfg, 2);
    for (const auto& task : task_ids()) m.register_task(task_spec(task), 2);
    m.register_task(wide, 2);
    const auto D = static_cast<std::size_t>(cfg.backbone.dim), DE = static_cast<std::size_t>(cfg.backbone.edge_dim);
    for (const auto& [id, spec] : m.tasks()) {
      for (std::size_t ty = 0; ty < spec.node_features.size(); ++ty) {
        const auto F = static_cast<std::size_t>(spec.node_features[ty]);
        const auto sv = singular_values(composite_node_map(m.params(), spec, cfg.codebook, static_cast<int>(ty)), F, D);
        ++maps;
        if (!bypass) {
          const auto bound = std::min<std::size_t>(F, static_cast<std::size_t>(cfg.codebook.node_codes));
          worst_tail = std::max(worst_tail, tail(sv, bound));
          bounded = bounded && rank_of(sv) <= bound;
        } else if (id == "wide") {
          bypass_full = bypass_full && rank_of(sv) == F;
        }
      }
      for (std::size_t p = 0; p < spec.edge_features.size(); ++p) {
        const auto F = static_cast<std::size_t>(spec.edge_features[p]);
        if (F == 0) continue;
        const auto sv = singular_values(composite_edge_map(m.params(), spec, cfg.codebook, static_cast<int>(p)), F, DE);
        ++maps;
        if (!bypass) {
          const auto bound = std::min<std::size_t>(F, static_cast<std::size_t>(cfg.codebook.edge_codes));
          worst_tail = std::max(worst_tail, tail(sv, bound));
          bounded = bounded && rank_of(sv) <= bound;
        } else if (id == "wide") {
          bypass_full = bypass_full && rank_of(sv) == F;
        }
      }
    }
  }
  const bool pass = bounded && worst_tail < kRankTol && bypass_full;
  return {pass, cat(maps, " composite maps; largest singular value past min(F, codes) ", worst_tail,
                    " (limit 1e-6); bypass gives full rank on F=12 / F_edge=6: ", bypass_full ? "yes" : "no")};
}

// ---------------------------------------------------------------- 6

Outcome criterion_oracles() {
  Stopwatch clock;
  int agree = 0, total = 0;
  auto run = [&](const std::string& task, int n, int count, auto&& check) {
    GenConfig g;
    g.task = task;
    g.n = n;
    g.count = count;
    g.seed = 100 + static_cast<std::uint64_t>(n);
    for (const auto& s : generate(g)) {
      ++total;
      agree += check(s) ? 1 : 0;
    }
  };
  for (int n = 3; n <= 9; ++n)
    run("atsp", n, 30, [](const Instance& s) { return solve_exact(s).objective == reference::atsp_permutations(s); });
  for (int n = 2; n <= 15; ++n)
    run("kp", n, 30, [](const Instance& s) { return solve_exact(s).objective == reference::kp_subsets(s); });
  for (int n = 2; n <= 12; ++n)
    run("mis", n, 30, [](const Instance& s) {
      return solve_exact(s).objective == static_cast<double>(reference::mis_exhaustive(s));
    });
  const double secs = clock.seconds();
  return {agree == total && secs < 300.0,
          cat(agree, "/", total, " exact agreements (ATSP 3-9, KP 2-15, MIS 2-12); ", secs, " s (limit 300 s)")};
}

// ---------------------------------------------------------------- 7

Outcome criterion_mdp_consistency() {
  const std::vector<std::pair<std::string, int>> sizes = {{"atsp", 8}, {"trp", 8}, {"cvrp", 7}, {"op", 8},
                                                          {"pctsp", 8}, {"kp", 15}, {"mvc", 10}, {"mis", 10},
                                                          {"jssp", 3}, {"ossp", 3}, {"umsp", 6}};
  const int wanted = 10000;
  const int per = (wanted + static_cast<int>(sizes.size()) - 1) / static_cast<int>(sizes.size());
  int trajectories = 0, replay_bad = 0, masked = 0, sampled_actions = 0;
  double worst = 0.0;
  for (const auto& [task, n] : sizes) {
    GenConfig g;
    g.task = task;
    g.n = n;
    g.count = per;
    g.seed = 77;
    const auto insts = generate(g);
    std::vector<Trajectory> trajs(insts.size());
    parallel_for(insts.size(), [&](std::size_t i) { trajs[i] = trajectory_from_solution(insts[i], solve(insts[i])); });
    const auto& spec = task_spec(task);
    for (std::size_t i = 0; i < insts.size(); ++i) {
      ++trajectories;
      const auto& tr = trajs[i];
      // replay, checking every expert action against the mask of its state
      Instance s = tr.initial;
      double cost = 0.0;
      for (const auto& a : tr.actions) {
        if (legal_mask(s)[static_cast<std::size_t>(flat_index(s, a))] != 0.0) ++masked;
        auto [next, c] = step(s, a);
        cost += c;
        s = std::move(next);
      }
      const double dev = std::abs(objective_from_cost(spec, cost) - tr.objective);
      worst = std::max(worst, dev);
      if (!(dev <= kReplayTol) || !is_terminal(s)) ++replay_bad;
      // sampled rollout under random logits: every sampled action must be open in the mask
      auto rng = std::make_shared<Rng>(stream_seed(9, static_cast<std::uint64_t>(trajectories)));
      Policy noisy = [rng](const Instance&, const ModelInput& in) {
        std::vector<double> lg(in.mask.size());
        for (auto& v : lg) v = rng->uniform(-4.0, 4.0);
        return score_actions(lg, in);
      };
      const auto smp = rollout(tr.initial, noisy, Decode::sample, stream_seed(10, static_cast<std::uint64_t>(trajectories)));
      Instance q = tr.initial;
      for (const auto& a : smp.actions) {
        ++sampled_actions;
        if (legal_mask(q)[static_cast<std::size_t>(flat_index(q, a))] != 0.0) ++masked;
        q = step(q, a).first;
      }
    }
  }
  const bool pass = trajectories >= wanted && replay_bad == 0 && masked == 0;
  return {pass, cat(trajectories, " oracle trajectories over ", sizes.size(), " tasks; replay mismatches ", replay_bad,
                    " (worst ", worst, ", limit 1e-9); masked actions taken ", masked, " of ", sampled_actions,
                    " sampled")};
}

// ---------------------------------------------------------------- 12

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int shell(const std::string& dir, const std::string& cmd, int workers) {
  const std::string full = "cd '" + dir + "' && GENCOP_WORKERS=" + std::to_string(workers) + " '" + cli_path() + "' " +
                           cmd + " >>cli.log 2>&1";
  return std::system(full.c_str());
}

Outcome criterion_reproducibility() {
  const auto root = fs::temp_directory_path() / "gencop_acceptance_repro";
  fs::remove_all(root);
  const std::vector<std::string> commands = {
      "gen --task atsp --n 8 --count 40 --seed 3 --out train.jsonl",
      "gen --task atsp --n 8 --count 10 --seed 4 --out valid.jsonl",
      "gen --task trp --n 8 --count 12 --seed 5 --out trp.jsonl",
      "gen --task jssp --n 3 --count 5 --seed 6 --out jssp.jsonl",
      "train --config run.json",
      "eval --checkpoint run/best.ckpt --task atsp --dataset valid.jsonl --out report",
      "eval --checkpoint run/best.ckpt --task atsp --dataset valid.jsonl --decode sample --k 3 --seed 2 --out sampled",
      "finetune --checkpoint run/best.ckpt --task trp --dataset trp.jsonl --register --labeled 8 --out sup.ckpt "
      "--report sup.json",
      "finetune --checkpoint run/best.ckpt --task trp --dataset trp.jsonl --register --mode self-improve --width 2 "
      "--rounds 2 --batch 8 --out si.ckpt --report si.json"};
  const std::string config =
      R"({"tasks":["atsp"],"train_datasets":{"atsp":"train.jsonl"},"valid_datasets":{"atsp":"valid.jsonl"},)"
      R"("epochs":2,"batch":8,"precision":"float64","out_dir":"run","seed":5,"model_seed":2})";
  std::vector<fs::path> dirs = {root / "a", root / "b"};
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    fs::create_directories(dirs[d]);
    std::ofstream(dirs[d] / "run.json") << config;
    for (const auto& c : commands) {
      if (shell(dirs[d].string(), c, static_cast<int>(d) + 1) != 0)
        return {false, "command failed: " + c + " (see " + (dirs[d] / "cli.log").string() + ")"};
    }
  }
  int compared = 0, differing = 0;
  std::string first_diff;
  for (const auto& entry : fs::recursive_directory_iterator(dirs[0])) {
    if (!entry.is_regular_file() || entry.path().filename() == "cli.log") continue;
    const auto rel = fs::relative(entry.path(), dirs[0]);
    ++compared;
    if (read_all(entry.path()) != read_all(dirs[1] / rel)) {
      ++differing;
      if (first_diff.empty()) first_diff = rel.string();
    }
  }
  const bool pass = differing == 0 && compared >= 15;
  return {pass, cat(compared, " artifacts from ", commands.size(), " CLI commands run twice (1 vs 2 workers), ",
                    differing, " differ", first_diff.empty() ? "" : " first: " + first_diff)};
}

}  // namespace

std::vector<Criterion> property_criteria() {
  return {{1, "gradient suite", criterion_gradients},
          {2, "mixed attention with zero edge projections equals vanilla", criterion_vanilla_reduction},
          {3, "permutation equivariance", criterion_equivariance},
          {4, "parameter census", criterion_census},
          {5, "codebook rank bound", criterion_codebook_rank},
          {6, "oracle equivalence", criterion_oracles},
          {7, "MDP consistency", criterion_mdp_consistency},
          {12, "CLI reproducibility", criterion_reproducibility}};
}

}  // namespace gencop::acceptance
