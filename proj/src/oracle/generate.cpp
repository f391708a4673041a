#include <algorithm>
#include <cmath>
#include <map>

#include "gencop/error.hpp"
#include "gencop/oracle.hpp"
#include "gencop/parallel.hpp"
#include "gencop/rng.hpp"

namespace gencop {
namespace {

std::vector<double> spaced_ids(int n, std::vector<double> ids) {
  if (ids.empty()) {
    for (int j = 0; j < n; ++j) ids.push_back((j + 0.5) / n);
  }
  if (static_cast<int>(ids.size()) != n) throw ShapeError("instance ids: expected " + std::to_string(n) + " values");
  return ids;
}

std::vector<double> random_ids(int n, Rng& rng) {
  std::vector<double> ids(static_cast<std::size_t>(n));
  for (auto& v : ids) v = rng.uniform();
  return ids;
}

bool is_routing(const std::string& t) { return t == "atsp" || t == "trp" || t == "cvrp" || t == "op" || t == "pctsp"; }

// Distance grid 2^-20: closure sums and tour lengths stay exact.
constexpr double kGrid = 1.0 / 1048576.0;

}  // namespace

double default_capacity(const std::string& task, int n) {
  if (task == "cvrp") {
    static const std::map<int, double> paper = {{100, 50.0}, {200, 80.0}, {500, 100.0}, {1000, 250.0}};
    if (auto it = paper.find(n); it != paper.end()) return it->second;
    if (n < 100) return std::max(10.0, std::round(50.0 * n / 100.0));
    return 50.0;
  }
  if (task == "kp") return 25.0 * n / 100.0;
  if (task == "op") return 4.0 * std::sqrt(n / 100.0);
  if (task == "pctsp") return 1.0;
  return 0.0;
}

Instance initial_state(const std::string& task, std::shared_ptr<const StaticData> data) {
  Instance s;
  s.task = task;
  s.n = static_cast<int>(data->type.size());
  s.alive.assign(static_cast<std::size_t>(s.n), 1);
  if (is_routing(task)) {
    s.origin = 0;
    s.destination = task == "trp" ? -1 : 0;
  }
  s.remaining = data->capacity;
  if (task == "jssp" || task == "ossp") {
    s.job_ready.assign(static_cast<std::size_t>(data->jobs), 0.0);
    s.machine_ready.assign(static_cast<std::size_t>(data->machines), 0.0);
  } else if (task == "umsp") {
    s.machine_ready.assign(static_cast<std::size_t>(data->machines), 0.0);
  }
  s.data = std::move(data);
  task_spec(task);
  return s;
}

Instance make_atsp(const std::vector<double>& dist, int n, std::vector<double> ids) {
  if (static_cast<int>(dist.size()) != n * n) throw ShapeError("make_atsp: distance matrix is not n x n");
  auto d = std::make_shared<StaticData>();
  d->edge_cols = 1;
  d->edge = dist;
  d->type.assign(static_cast<std::size_t>(n), 0);
  d->id = spaced_ids(n, std::move(ids));
  return initial_state("atsp", d);
}

Instance make_euclidean(const std::string& task, const std::vector<double>& xy, const std::vector<double>& extra,
                        int extra_cols, double capacity, std::vector<double> ids) {
  const int n = static_cast<int>(xy.size() / 2);
  if (!is_routing(task)) throw UsageError("make_euclidean: " + task + " is not a routing task");
  if (static_cast<int>(extra.size()) != n * extra_cols) throw ShapeError("make_euclidean: attribute block size");
  auto d = std::make_shared<StaticData>();
  d->attr_cols = 2 + extra_cols;
  for (int j = 0; j < n; ++j) {
    d->attr.push_back(xy[static_cast<std::size_t>(2 * j)]);
    d->attr.push_back(xy[static_cast<std::size_t>(2 * j + 1)]);
    for (int c = 0; c < extra_cols; ++c) d->attr.push_back(extra[static_cast<std::size_t>(j * extra_cols + c)]);
  }
  d->edge_cols = 1;
  d->edge.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double dx = xy[static_cast<std::size_t>(2 * i)] - xy[static_cast<std::size_t>(2 * j)];
      const double dy = xy[static_cast<std::size_t>(2 * i + 1)] - xy[static_cast<std::size_t>(2 * j + 1)];
      d->edge[static_cast<std::size_t>(i * n + j)] = std::sqrt(dx * dx + dy * dy);
    }
  d->type.assign(static_cast<std::size_t>(n), 0);
  d->id = spaced_ids(n, std::move(ids));
  d->capacity = capacity;
  return initial_state(task, d);
}

Instance make_kp(const std::vector<double>& values, const std::vector<double>& weights, double capacity,
                 std::vector<double> ids) {
  const int n = static_cast<int>(values.size());
  if (weights.size() != values.size()) throw ShapeError("make_kp: values and weights differ in length");
  auto d = std::make_shared<StaticData>();
  d->attr_cols = 2;
  for (int j = 0; j < n; ++j) {
    d->attr.push_back(values[static_cast<std::size_t>(j)]);
    d->attr.push_back(weights[static_cast<std::size_t>(j)]);
  }
  d->type.assign(static_cast<std::size_t>(n), 0);
  d->id = spaced_ids(n, std::move(ids));
  d->capacity = capacity;
  return initial_state("kp", d);
}

Instance make_graph(const std::string& task, int n, const std::vector<std::pair<int, int>>& edges,
                    std::vector<double> ids) {
  if (task != "mvc" && task != "mis") throw UsageError("make_graph: " + task + " is not a graph task");
  auto d = std::make_shared<StaticData>();
  d->edge_cols = 1;
  d->edge.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  for (auto [a, b] : edges) {
    if (a == b || a < 0 || b < 0 || a >= n || b >= n) throw DataError("make_graph: bad edge");
    d->edge[static_cast<std::size_t>(a * n + b)] = 1.0;
    d->edge[static_cast<std::size_t>(b * n + a)] = 1.0;
  }
  d->type.assign(static_cast<std::size_t>(n), 0);
  d->id = spaced_ids(n, std::move(ids));
  return initial_state(task, d);
}

Instance make_shop(const std::string& task, int jobs, int machines, const std::vector<int>& order,
                   const std::vector<double>& durations, std::vector<double> ids) {
  if (task != "jssp" && task != "ossp") throw UsageError("make_shop: " + task + " is not a shop task");
  const auto ops = static_cast<std::size_t>(jobs * machines);
  if (order.size() != ops || durations.size() != ops) throw ShapeError("make_shop: expected jobs x machines entries");
  auto d = std::make_shared<StaticData>();
  d->attr_cols = 4;
  d->jobs = jobs;
  d->machines = machines;
  for (int j = 0; j < jobs; ++j)
    for (int k = 0; k < machines; ++k) {
      const auto i = static_cast<std::size_t>(j * machines + k);
      d->attr.insert(d->attr.end(), {static_cast<double>(j), static_cast<double>(k), static_cast<double>(order[i]),
                                     durations[i]});
      d->type.push_back(0);
    }
  for (int m = 0; m < machines; ++m) {
    d->attr.insert(d->attr.end(), {static_cast<double>(m), 0.0, 0.0, 0.0});
    d->type.push_back(1);
  }
  d->id = spaced_ids(jobs * machines + machines, std::move(ids));
  return initial_state(task, d);
}

Instance make_umsp(int jobs, int machines, const std::vector<double>& durations, std::vector<double> ids) {
  if (durations.size() != static_cast<std::size_t>(jobs * machines)) throw ShapeError("make_umsp: expected jobs x machines");
  const int n = jobs + machines;
  auto d = std::make_shared<StaticData>();
  d->jobs = jobs;
  d->machines = machines;
  d->edge_cols = 1;
  d->edge.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < jobs; ++j)
    for (int m = 0; m < machines; ++m) {
      const double t = durations[static_cast<std::size_t>(j * machines + m)];
      d->edge[static_cast<std::size_t>(j * n + jobs + m)] = t;
      d->edge[static_cast<std::size_t>((jobs + m) * n + j)] = t;
    }
  for (int j = 0; j < n; ++j) d->type.push_back(j < jobs ? 0 : 1);
  d->id = spaced_ids(n, std::move(ids));
  return initial_state("umsp", d);
}

Instance generate_one(const GenConfig& cfg, std::uint64_t index) {
  const auto& t = cfg.task;
  task_spec(t);
  if (cfg.n < 2) throw UsageError("generate: n must be at least 2");
  if ((t == "jssp" || t == "ossp" || t == "umsp") && cfg.machines < 1) throw UsageError("generate: machines must be positive");
  Rng rng(stream_seed(cfg.seed, index));
  const int n = cfg.n;
  const double cap = cfg.capacity > 0.0 ? cfg.capacity : default_capacity(t, n);

  if (t == "atsp") {
    const auto ids = random_ids(n, rng);
    std::vector<double> d(static_cast<std::size_t>(n * n), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) d[static_cast<std::size_t>(i * n + j)] = static_cast<double>(rng.integer(1, 1 << 20)) * kGrid;
    for (bool changed = true; changed;) {
      changed = false;
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const double via = d[static_cast<std::size_t>(i * n + k)] + d[static_cast<std::size_t>(k * n + j)];
            if (via < d[static_cast<std::size_t>(i * n + j)]) {
              d[static_cast<std::size_t>(i * n + j)] = via;
              changed = true;
            }
          }
    }
    return make_atsp(d, n, ids);
  }
  if (is_routing(t)) {
    const auto ids = random_ids(n, rng);
    std::vector<double> xy(static_cast<std::size_t>(2 * n));
    for (auto& v : xy) v = rng.uniform();
    if (t == "trp") return make_euclidean(t, xy, {}, 0, 0.0, ids);
    if (t == "cvrp") {
      std::vector<double> demand(static_cast<std::size_t>(n), 0.0);
      for (int j = 1; j < n; ++j) demand[static_cast<std::size_t>(j)] = static_cast<double>(rng.integer(1, 10));
      return make_euclidean(t, xy, demand, 1, cap, ids);
    }
    if (t == "op") {
      std::vector<double> dist(static_cast<std::size_t>(n), 0.0);
      double far = 0.0;
      for (int j = 1; j < n; ++j) {
        const double dx = xy[static_cast<std::size_t>(2 * j)] - xy[0], dy = xy[static_cast<std::size_t>(2 * j + 1)] - xy[1];
        dist[static_cast<std::size_t>(j)] = std::sqrt(dx * dx + dy * dy);
        far = std::max(far, dist[static_cast<std::size_t>(j)]);
      }
      std::vector<double> prize(static_cast<std::size_t>(n), 0.0);
      for (int j = 1; j < n; ++j) {
        prize[static_cast<std::size_t>(j)] = (1.0 + std::floor(99.0 * dist[static_cast<std::size_t>(j)] / far)) / 100.0;
      }
      return make_euclidean(t, xy, prize, 1, cap, ids);
    }
    std::vector<double> extra(static_cast<std::size_t>(2 * n), 0.0);
    double total = 0.0;
    for (int j = 1; j < n; ++j) {
      extra[static_cast<std::size_t>(2 * j)] = rng.uniform() * 4.0 / n;
      total += extra[static_cast<std::size_t>(2 * j)];
    }
    for (int j = 1; j < n; ++j) extra[static_cast<std::size_t>(2 * j + 1)] = rng.uniform() * 12.0 / n;
    return make_euclidean(t, xy, extra, 2, std::min(cap, total), ids);
  }
  if (t == "kp") {
    const auto ids = random_ids(n, rng);
    std::vector<double> v(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      v[static_cast<std::size_t>(j)] = rng.uniform();
      w[static_cast<std::size_t>(j)] = static_cast<double>(rng.integer(0, 10000)) / 10000.0;
    }
    return make_kp(v, w, cap, ids);
  }
  if (t == "mvc" || t == "mis") {
    const auto ids = random_ids(n, rng);
    const double p = std::max(rng.uniform(cfg.edge_low, cfg.edge_high), 2.0 / n);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.uniform() < p) edges.emplace_back(i, j);
    return make_graph(t, n, edges, ids);
  }
  const int m = cfg.machines;
  if (t == "umsp") {
    const auto ids = random_ids(n + m, rng);
    std::vector<double> dur(static_cast<std::size_t>(n * m));
    for (auto& v : dur) v = static_cast<double>(rng.integer(1, 100));
    return make_umsp(n, m, dur, ids);
  }
  const auto ids = random_ids(n * m + m, rng);
  std::vector<int> order;
  std::vector<double> dur;
  for (int j = 0; j < n; ++j) {
    std::vector<int> perm(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) perm[static_cast<std::size_t>(k)] = k;
    rng.shuffle(perm);
    order.insert(order.end(), perm.begin(), perm.end());
    for (int k = 0; k < m; ++k) dur.push_back(static_cast<double>(rng.integer(1, 100)));
  }
  return make_shop(t, n, m, order, dur, ids);
}

std::vector<Instance> generate(const GenConfig& cfg) {
  if (cfg.count < 0) throw UsageError("generate: count must be non-negative");
  std::vector<Instance> out(static_cast<std::size_t>(cfg.count));
  parallel_for(out.size(), [&](std::size_t i) { out[i] = generate_one(cfg, i); });
  return out;
}

}  // namespace gencop
