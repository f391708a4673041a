#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gencop/error.hpp"
#include "gencop/io.hpp"
#include "support.hpp"

using namespace gencop;
namespace fs = std::filesystem;

namespace {

std::string scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "gencop_test_io";
  fs::create_directories(dir);
  return (dir / name).string();
}

std::string bytes_of(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void flip_byte(const std::string& path, std::size_t from_end) {
  auto b = bytes_of(path);
  b[b.size() - 1 - from_end] ^= 0x01;
  std::ofstream(path, std::ios::binary | std::ios::trunc).write(b.data(), static_cast<std::streamsize>(b.size()));
}

void check_same_instance(const Instance& a, const Instance& b) {
  CHECK(a.task == b.task);
  CHECK(a.n == b.n);
  CHECK(a.data->type == b.data->type);
  CHECK(a.data->id == b.data->id);
  CHECK(a.data->attr == b.data->attr);
  CHECK(a.data->attr_cols == b.data->attr_cols);
  CHECK(a.data->edge == b.data->edge);
  CHECK(a.data->edge_cols == b.data->edge_cols);
  CHECK(a.data->capacity == b.data->capacity);
  CHECK(a.data->jobs == b.data->jobs);
  CHECK(a.data->machines == b.data->machines);
  CHECK(a.alive == b.alive);
  CHECK(a.origin == b.origin);
  CHECK(a.destination == b.destination);
  CHECK(a.remaining == b.remaining);
  CHECK(a.makespan == b.makespan);
  CHECK(a.job_ready == b.job_ready);
  CHECK(a.machine_ready == b.machine_ready);
  CHECK(a.done == b.done);
}

}  // namespace

TEST_CASE("dataset round trip for every task") {
  for (const auto& task : task_ids()) {
    GenConfig g;
    g.task = task;
    g.n = task == "jssp" || task == "ossp" ? 3 : 7;
    g.count = 3;
    g.seed = 11;
    const auto ds = build_dataset(g);
    const auto path = scratch(task + ".jsonl");
    write_dataset(path, ds);
    const auto back = read_dataset(path);
    CAPTURE(task);
    CHECK(back.header == ds.header);
    REQUIRE(back.records.size() == ds.records.size());
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
      const auto& a = ds.records[i];
      const auto& b = back.records[i];
      check_same_instance(a.instance, b.instance);
      CHECK(a.oracle.objective == b.oracle.objective);
      CHECK(a.oracle.optimal == b.oracle.optimal);
      CHECK(a.oracle.routes == b.oracle.routes);
      CHECK(a.oracle.items == b.oracle.items);
      CHECK(a.oracle.assignment == b.oracle.assignment);
      CHECK(a.oracle.finish == b.oracle.finish);
      CHECK(a.trajectory.actions == b.trajectory.actions);
      CHECK(a.trajectory.ordered == b.trajectory.ordered);
      CHECK(std::abs(objective_from_cost(task_spec(task), replay_cost(b.trajectory)) - b.oracle.objective) < 1e-9);
    }
    // rewriting the parsed file reproduces it byte for byte
    const auto again = scratch(task + "_again.jsonl");
    write_dataset(again, back);
    CHECK(bytes_of(path) == bytes_of(again));
  }
}

TEST_CASE("dataset header and generator defaults") {
  GenConfig g;
  g.task = "kp";
  g.n = 20;
  g.count = 1;
  const auto ds = build_dataset(g);
  CHECK(ds.header.at("generator").at("capacity").get<double>() == 5.0);
  CHECK(ds.header.at("schema_version").get<int>() == kDatasetSchema);
  CHECK(ds.header.at("N").get<int>() == 20);
}

TEST_CASE("large instances use sparse edge storage") {
  GenConfig g;
  g.task = "mvc";
  g.n = 300;
  g.count = 1;
  const auto s = generate(g).front();
  const auto j = instance_to_json(s);
  CHECK(j.at("edge_features").contains("sparse"));
  CHECK_FALSE(j.at("edge_features").contains("dense"));
  check_same_instance(s, instance_from_json(j));
}

TEST_CASE("dataset reader rejects malformed input") {
  const auto path = scratch("bad.jsonl");
  {
    std::ofstream(path) << "{\"schema_version\":1,\"task\":\"atsp\"}\n{\"task\":\"atsp\",\"n\":2}\n";
  }
  CHECK_THROWS_AS(read_dataset(path), DataError);
  {
    std::ofstream(path) << "{\"schema_version\":7,\"task\":\"atsp\"}\n";
  }
  CHECK_THROWS_AS(read_dataset(path), DataError);
  CHECK_THROWS_AS(read_dataset(scratch("missing.jsonl")), UsageError);
}

TEST_CASE("task spec and model config JSON round trip") {
  for (const auto& task : task_ids()) {
    const auto& s = task_spec(task);
    const auto b = task_from_json(task_to_json(s));
    CHECK(b.id == s.id);
    CHECK(b.node_features == s.node_features);
    CHECK(b.edge_features == s.edge_features);
    CHECK(b.options == s.options);
    CHECK(b.loss == s.loss);
    CHECK(b.direction == s.direction);
    CHECK(b.action_type == s.action_type);
    CHECK(b.graph.types == s.graph.types);
    CHECK(b.graph.feed_forward == s.graph.feed_forward);
    REQUIRE(b.graph.pairs.size() == s.graph.pairs.size());
  }
  ModelConfig c;
  c.backbone = BackboneConfig::paper();
  c.codebook.bypass = true;
  c.attention.mode = AttentionMode::vanilla;
  CHECK(model_config_from_json(model_config_to_json(c)) == c);
}

TEST_CASE("checkpoint round trip is bitwise for float parameters and optimizer state") {
  ModelConfig cfg;
  cfg.backbone = test::tiny_backbone();
  Model<float> model(cfg, 3);
  model.register_task(task_spec("atsp"), 3);
  model.register_task(task_spec("jssp"), 3);
  Rng rng(2);
  test::randomize(model.params(), rng, 0.85);
  OptimState st;
  st.step = 17;
  st.epoch = 2;
  auto& slot = st.slots["layer.0.ff.w1"];
  slot.m = {0.25, -0.5};
  slot.v = {0.125, 1.0};
  slot.steps = 9;
  const auto path = scratch("model.ckpt");
  save_checkpoint(path, model, &st, Json{{"note", "x"}});

  OptimState back_st;
  const auto back = load_checkpoint<float>(path, &back_st);
  CHECK(back.config() == model.config());
  CHECK(back.tasks().size() == 2);
  for (const auto& [name, t] : model.params()) {
    CAPTURE(name);
    REQUIRE(back.params().contains(name));
    CHECK(back.params().at(name).shape == t.shape);
    CHECK(std::memcmp(back.params().at(name).values.data(), t.values.data(), t.size() * sizeof(float)) == 0);
  }
  CHECK(back_st.step == 17);
  CHECK(back_st.epoch == 2);
  CHECK(back_st.slots.at("layer.0.ff.w1").m == slot.m);
  CHECK(back_st.slots.at("layer.0.ff.w1").v == slot.v);
  CHECK(back_st.slots.at("layer.0.ff.w1").steps == 9);
  CHECK(read_checkpoint_header(path).manifest.at("extra").at("note") == "x");

  // save, load, save again: identical bytes
  const auto again = scratch("model_again.ckpt");
  save_checkpoint(again, back, &back_st, Json{{"note", "x"}});
  CHECK(bytes_of(path) == bytes_of(again));
}

TEST_CASE("double checkpoints store single precision") {
  ModelConfig cfg;
  cfg.backbone = test::tiny_backbone();
  Model<double> model(cfg, 5);
  model.register_task(task_spec("kp"), 5);
  const auto path = scratch("double.ckpt");
  save_checkpoint(path, model);
  const auto back = load_checkpoint<double>(path);
  for (const auto& [name, t] : model.params())
    for (std::size_t i = 0; i < t.size(); ++i)
      CHECK(back.params().at(name).values[i] == static_cast<double>(static_cast<float>(t.values[i])));
  CHECK(read_checkpoint_header(path).manifest.at("precision") == "float64");
}

TEST_CASE("corrupted checkpoints are refused") {
  ModelConfig cfg;
  cfg.backbone = test::tiny_backbone();
  Model<float> model(cfg, 1);
  model.register_task(task_spec("mvc"), 1);
  const auto path = scratch("corrupt.ckpt");
  save_checkpoint(path, model);
  flip_byte(path, 3);
  CHECK_THROWS_AS(load_checkpoint<float>(path), DataError);

  save_checkpoint(path, model);
  auto b = bytes_of(path);
  b[25] = static_cast<char>(b[25] ^ 0x20);
  std::ofstream(path, std::ios::binary | std::ios::trunc).write(b.data(), static_cast<std::streamsize>(b.size()));
  CHECK_THROWS_AS(load_checkpoint<float>(path), DataError);

  save_checkpoint(path, model);
  b = bytes_of(path);
  b.resize(b.size() - 4);
  std::ofstream(path, std::ios::binary | std::ios::trunc).write(b.data(), static_cast<std::streamsize>(b.size()));
  CHECK_THROWS_AS(load_checkpoint<float>(path), DataError);
}

TEST_CASE("paper preset manifest") {
  RunConfig rc;
  rc.preset = "paper";
  Model<float> model(model_config_for(rc), 0);
  model.register_task(task_spec("atsp"), 0);
  const auto path = scratch("paper.ckpt");
  save_checkpoint(path, model);
  const auto m = read_checkpoint_header(path).manifest.at("model");
  CHECK(m.at("layers") == 9);
  CHECK(m.at("dim") == 128);
  CHECK(m.at("heads") == 8);
  CHECK(m.at("ff_dim") == 512);
  CHECK(m.at("node_codes") == 8);
  CHECK(m.at("edge_codes") == 4);
}

TEST_CASE("run config parsing") {
  const auto c = parse_run_config(Json::parse(R"({"tasks":["atsp","kp"],"epochs":3,"learning_rate":0.001,
    "train_datasets":{"atsp":"a","kp":"b"},"precision":"float32"})"));
  CHECK(c.tasks == std::vector<std::string>{"atsp", "kp"});
  CHECK(c.train.epochs == 3);
  CHECK(c.train.learning_rate == 0.001);
  CHECK(c.train.decay == 0.97);
  CHECK(c.precision == "float32");
  CHECK(parse_run_config(run_config_to_json(c)).train.epochs == 3);
  CHECK(run_config_to_json(parse_run_config(run_config_to_json(c))) == run_config_to_json(c));

  CHECK_THROWS_AS(parse_run_config(Json::parse(R"({"epoch":3})")), UsageError);
  CHECK_THROWS_AS(parse_run_config(Json::parse(R"({"preset":"huge"})")), UsageError);
  CHECK_THROWS_AS(parse_run_config(Json::parse(R"({"tasks":["tsp9"]})")), UsageError);
  CHECK_THROWS_AS(parse_run_config(Json::parse(R"({"batch":"many"})")), UsageError);
  CHECK_THROWS_AS(parse_run_config(Json::parse("[1,2]")), UsageError);
  // tasks default to the keys of train_datasets
  CHECK(parse_run_config(Json::parse(R"({"train_datasets":{"mvc":"m"}})")).tasks == std::vector<std::string>{"mvc"});
}

TEST_CASE("gap report serialization") {
  const auto r = gap_report("atsp", {1.1, 2.0, 3.3}, {1.0, 2.0, 3.0});
  const auto j = gap_report_to_json(r);
  CHECK(j.at("count") == 3);
  CHECK(j.at("instances").size() == 3);
  CHECK(j.at("instances")[1].at("gap").get<double>() == 0.0);
  CHECK_FALSE(gap_report_to_json(r, false).contains("instances"));
  Metric m;
  m.gap = std::numeric_limits<double>::quiet_NaN();
  CHECK(metric_to_json(m).at("gap").is_null());
  const auto csv = scratch("gap.csv");
  write_gap_csv(csv, r);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "index,objective,reference,gap");
}
