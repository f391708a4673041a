#include <cmath>
#include <fstream>

#include "gencop/error.hpp"
#include "gencop/io.hpp"
#include "gencop/parallel.hpp"

namespace gencop {
namespace {

constexpr int kDenseLimit = 256;

std::vector<std::vector<double>> rows_of(const std::vector<double>& flat, int cols, int n) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)].assign(flat.begin() + static_cast<std::ptrdiff_t>(i) * cols,
                                            flat.begin() + static_cast<std::ptrdiff_t>(i + 1) * cols);
  return out;
}

template <typename V>
V field(const Json& j, const char* key) {
  if (!j.contains(key)) throw DataError(std::string("dataset: missing field ") + key);
  return j.at(key).get<V>();
}

}  // namespace

std::vector<Trajectory> Dataset::trajectories() const {
  std::vector<Trajectory> out;
  for (const auto& r : records) out.push_back(r.trajectory);
  return out;
}

Json instance_to_json(const Instance& s) {
  const auto& d = *s.data;
  Json j;
  j["task"] = s.task;
  j["n"] = s.n;
  j["types"] = d.type;
  j["ids"] = d.id;
  j["node_features"] = rows_of(d.attr, d.attr_cols, d.attr_cols > 0 ? s.n : 0);
  j["node_columns"] = d.attr_cols;
  Json e;
  e["channels"] = d.edge_cols;
  if (d.edge_cols > 0) {
    if (s.n <= kDenseLimit) {
      e["dense"] = d.edge;
    } else {
      Json trip = Json::array();
      for (int a = 0; a < s.n; ++a)
        for (int b = 0; b < s.n; ++b)
          for (int c = 0; c < d.edge_cols; ++c) {
            const double v = s.edge(a, b, c);
            if (v != 0.0) trip.push_back(Json::array({a, b, c, v}));
          }
      e["sparse"] = trip;
    }
  }
  j["edge_features"] = e;
  Json b;
  b["capacity"] = d.capacity;
  b["jobs"] = d.jobs;
  b["machines"] = d.machines;
  b["alive"] = std::vector<int>(s.alive.begin(), s.alive.end());
  b["origin"] = s.origin;
  b["destination"] = s.destination;
  b["remaining"] = s.remaining;
  b["makespan"] = s.makespan;
  b["job_ready"] = s.job_ready;
  b["machine_ready"] = s.machine_ready;
  b["done"] = s.done;
  j["bookkeeping"] = b;
  return j;
}

Instance instance_from_json(const Json& j) {
  auto d = std::make_shared<StaticData>();
  Instance s;
  s.task = field<std::string>(j, "task");
  task_spec(s.task);
  s.n = field<int>(j, "n");
  d->type = field<std::vector<int>>(j, "types");
  d->id = field<std::vector<double>>(j, "ids");
  d->attr_cols = field<int>(j, "node_columns");
  for (const auto& row : j.at("node_features")) {
    if (static_cast<int>(row.size()) != d->attr_cols) throw DataError("dataset: node feature row width mismatch");
    for (const auto& v : row) d->attr.push_back(v.get<double>());
  }
  const auto& e = j.at("edge_features");
  d->edge_cols = field<int>(e, "channels");
  const auto cells = static_cast<std::size_t>(s.n) * static_cast<std::size_t>(s.n) * static_cast<std::size_t>(d->edge_cols);
  if (e.contains("dense")) {
    d->edge = e.at("dense").get<std::vector<double>>();
  } else if (e.contains("sparse")) {
    d->edge.assign(cells, 0.0);
    for (const auto& t : e.at("sparse")) {
      const auto a = t.at(0).get<std::size_t>(), b = t.at(1).get<std::size_t>(), c = t.at(2).get<std::size_t>();
      d->edge.at((a * static_cast<std::size_t>(s.n) + b) * static_cast<std::size_t>(d->edge_cols) + c) = t.at(3).get<double>();
    }
  }
  if (d->edge.size() != cells) throw DataError("dataset: edge feature block has the wrong size");
  if (static_cast<int>(d->type.size()) != s.n || static_cast<int>(d->id.size()) != s.n ||
      d->attr.size() != static_cast<std::size_t>(d->attr_cols > 0 ? s.n * d->attr_cols : 0)) {
    throw DataError("dataset: node arrays do not cover n nodes");
  }
  const auto& b = j.at("bookkeeping");
  d->capacity = field<double>(b, "capacity");
  d->jobs = field<int>(b, "jobs");
  d->machines = field<int>(b, "machines");
  const auto alive = field<std::vector<int>>(b, "alive");
  s.alive.assign(alive.begin(), alive.end());
  s.origin = field<int>(b, "origin");
  s.destination = field<int>(b, "destination");
  s.remaining = field<double>(b, "remaining");
  s.makespan = field<double>(b, "makespan");
  s.job_ready = field<std::vector<double>>(b, "job_ready");
  s.machine_ready = field<std::vector<double>>(b, "machine_ready");
  s.done = field<bool>(b, "done");
  if (static_cast<int>(s.alive.size()) != s.n) throw DataError("dataset: liveness flags do not cover n nodes");
  s.data = std::move(d);
  return s;
}

Json solution_to_json(const Solution& s) {
  Json j;
  j["objective"] = s.objective;
  j["optimal"] = s.optimal;
  Json st;
  if (!s.routes.empty()) st["routes"] = s.routes;
  if (!s.items.empty()) st["items"] = s.items;
  if (!s.assignment.empty()) st["assignment"] = s.assignment;
  if (!s.finish.empty()) st["finish"] = s.finish;
  j["structure"] = st.is_null() ? Json::object() : st;
  return j;
}

Solution solution_from_json(const Json& j, const std::string& task) {
  Solution s;
  s.task = task;
  s.objective = field<double>(j, "objective");
  s.optimal = field<bool>(j, "optimal");
  const auto& st = j.at("structure");
  if (st.contains("routes")) s.routes = st.at("routes").get<std::vector<std::vector<int>>>();
  if (st.contains("items")) s.items = st.at("items").get<std::vector<int>>();
  if (st.contains("assignment")) s.assignment = st.at("assignment").get<std::vector<int>>();
  if (st.contains("finish")) s.finish = st.at("finish").get<std::vector<double>>();
  return s;
}

Json genconfig_to_json(const GenConfig& g) {
  return Json{{"task", g.task},         {"n", g.n},
              {"count", g.count},       {"seed", g.seed},
              {"machines", g.machines}, {"capacity", g.capacity > 0.0 ? g.capacity : default_capacity(g.task, g.n)},
              {"edge_low", g.edge_low}, {"edge_high", g.edge_high}};
}

Dataset build_dataset(const GenConfig& cfg) {
  Dataset ds;
  const auto insts = generate(cfg);
  ds.records.resize(insts.size());
  parallel_for(insts.size(), [&](std::size_t i) {
    auto& r = ds.records[i];
    r.instance = insts[i];
    r.oracle = solve(insts[i]);
    r.trajectory = trajectory_from_solution(insts[i], r.oracle);
  });
  ds.header = Json{{"schema_version", kDatasetSchema}, {"kind", "gencop-dataset"}, {"task", cfg.task},
                   {"N", cfg.n},  {"count", cfg.count}, {"seed", cfg.seed}, {"generator", genconfig_to_json(cfg)}};
  return ds;
}

void write_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write dataset file " + path);
  out << ds.header.dump() << '\n';
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const auto& r = ds.records[i];
    Json j = instance_to_json(r.instance);
    j["index"] = i;
    j["oracle"] = solution_to_json(r.oracle);
    Json acts = Json::array();
    for (const auto& a : r.trajectory.actions) acts.push_back(Json::array({a.node, a.option}));
    j["trajectory"] = Json{{"actions", acts}, {"ordered", r.trajectory.ordered}};
    out << j.dump() << '\n';
  }
  if (!out) throw UsageError("failed while writing dataset file " + path);
}

Json read_dataset_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open dataset file " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("dataset " + path + " is empty");
  Json h;
  try {
    h = Json::parse(line);
  } catch (const Json::exception& e) {
    throw DataError("dataset " + path + ": bad header: " + e.what());
  }
  const int v = h.value("schema_version", 0);
  if (v < kDatasetSchema - 1 || v > kDatasetSchema || v < 1) {
    throw DataError("dataset " + path + ": unsupported schema version " + std::to_string(v));
  }
  return h;
}

Dataset read_dataset(const std::string& path) {
  Dataset ds;
  ds.header = read_dataset_header(path);
  const auto task = ds.header.at("task").get<std::string>();
  std::ifstream in(path, std::ios::binary);
  std::string line;
  std::getline(in, line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const Json j = Json::parse(line);
      DatasetRecord r;
      r.instance = instance_from_json(j);
      if (r.instance.task != task) throw DataError("record task differs from the header");
      r.oracle = solution_from_json(j.at("oracle"), task);
      r.trajectory.initial = r.instance;
      r.trajectory.objective = r.oracle.objective;
      r.trajectory.ordered = j.at("trajectory").at("ordered").get<bool>();
      for (const auto& a : j.at("trajectory").at("actions")) r.trajectory.actions.push_back({a.at(0).get<int>(), a.at(1).get<int>()});
      ds.records.push_back(std::move(r));
    } catch (const Json::exception& e) {
      throw DataError("dataset " + path + " line " + std::to_string(lineno) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("dataset " + path + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return ds;
}

}  // namespace gencop
