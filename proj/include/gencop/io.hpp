#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gencop/oracle.hpp"
#include "gencop/trainer.hpp"
#include "json.hpp"

namespace gencop {

using Json = nlohmann::json;

constexpr int kDatasetSchema = 1;

struct DatasetRecord {
  Instance instance;
  Solution oracle;
  Trajectory trajectory;
};

struct Dataset {
  Json header;
  std::vector<DatasetRecord> records;
  std::vector<Trajectory> trajectories() const;
};

Json instance_to_json(const Instance& s);
Instance instance_from_json(const Json& j);
Json solution_to_json(const Solution& s);
Solution solution_from_json(const Json& j, const std::string& task);

// Generates, solves (exact within limits) and writes one dataset. Returns
// the records as written.
Dataset build_dataset(const GenConfig& cfg);
void write_dataset(const std::string& path, const Dataset& ds);
Dataset read_dataset(const std::string& path);
// Header line only.
Json read_dataset_header(const std::string& path);

Json genconfig_to_json(const GenConfig& g);

Json task_to_json(const TaskSpec& s);
TaskSpec task_from_json(const Json& j);
Json model_config_to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const Json& j);

// Binary checkpoint: magic, manifest length, manifest JSON, manifest hash,
// float32 little-endian payload (parameters, then optimizer moments when
// training state is saved).
template <typename T>
void save_checkpoint(const std::string& path, const Model<T>& model, const OptimState* optim = nullptr,
                     const Json& extra = Json::object());

struct CheckpointHeader {
  Json manifest;
  std::uint64_t payload_offset = 0;
};
CheckpointHeader read_checkpoint_header(const std::string& path);

template <typename T>
Model<T> load_checkpoint(const std::string& path, OptimState* optim = nullptr);

// Flat key-value run configuration (JSON object). Unknown keys are rejected.
struct RunConfig {
  std::string preset = "desk";       // desk | paper
  std::string precision = "float64"; // float64 | float32
  bool codebook_bypass = false;
  std::string attention = "mixed";   // mixed | vanilla
  std::vector<std::string> tasks;
  std::map<std::string, std::string> train_datasets;
  std::map<std::string, std::string> valid_datasets;
  int valid_limit = 0;               // 0: every validation record
  std::string out_dir = "run";
  std::string resume;                // checkpoint to continue from
  std::string metrics = "metrics.jsonl";
  std::uint64_t model_seed = 0;
  TrainConfig train;
  // generator parameters (gen --config)
  int gen_n = 10;
  int gen_count = 100;
  std::uint64_t gen_seed = 0;
  int gen_machines = 3;
};

RunConfig parse_run_config(const Json& j);
RunConfig load_run_config(const std::string& path);
Json run_config_to_json(const RunConfig& c);
ModelConfig model_config_for(const RunConfig& c);

Json metric_to_json(const Metric& m);
Json gap_report_to_json(const GapReport& r, bool rows = true);
void write_gap_csv(const std::string& path, const GapReport& r);

}  // namespace gencop
