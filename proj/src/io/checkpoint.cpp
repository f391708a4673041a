#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gencop/error.hpp"
#include "gencop/hash.hpp"
#include "gencop/io.hpp"

namespace gencop {
namespace {

constexpr char kMagic[8] = {'G', 'E', 'N', 'C', 'O', 'P', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}
void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}
std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}
std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}
void put_f32(std::string& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open checkpoint " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Parsed {
  Json manifest;
  std::string bytes;
  std::size_t payload = 0;
};

Parsed parse(const std::string& path) {
  Parsed p;
  p.bytes = slurp(path);
  const auto* b = reinterpret_cast<const unsigned char*>(p.bytes.data());
  if (p.bytes.size() < 20 || std::memcmp(b, kMagic, 8) != 0) throw DataError(path + " is not a checkpoint");
  if (get_u32(b + 8) != kVersion) throw DataError(path + ": unsupported checkpoint version");
  const std::uint64_t len = get_u64(b + 12);
  if (p.bytes.size() < 20 + len + 8) throw DataError(path + ": truncated manifest");
  const std::string_view text(p.bytes.data() + 20, len);
  if (fnv1a64(text) != get_u64(b + 20 + len)) throw DataError(path + ": manifest hash mismatch");
  p.manifest = Json::parse(text);
  p.payload = 20 + len + 8;
  const std::string_view payload(p.bytes.data() + p.payload, p.bytes.size() - p.payload);
  if (payload.size() != p.manifest.at("payload_bytes").get<std::size_t>() ||
      fnv1a64(payload) != std::stoull(p.manifest.at("payload_hash").get<std::string>(), nullptr, 16)) {
    throw DataError(path + ": payload hash mismatch (corrupted checkpoint)");
  }
  return p;
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

}  // namespace

Json task_to_json(const TaskSpec& s) {
  Json pairs = Json::array();
  for (const auto& p : s.graph.pairs) pairs.push_back(Json{{"target", p.target}, {"source", p.source}, {"edges", p.edges}});
  return Json{{"id", s.id},
              {"node_features", s.node_features},
              {"edge_features", s.edge_features},
              {"options", s.options},
              {"loss", to_string(s.loss)},
              {"direction", to_string(s.direction)},
              {"action_type", s.action_type},
              {"graph", Json{{"types", s.graph.types}, {"pairs", pairs}, {"feed_forward", s.graph.feed_forward}}}};
}

TaskSpec task_from_json(const Json& j) {
  TaskSpec s;
  s.id = j.at("id").get<std::string>();
  s.node_features = j.at("node_features").get<std::vector<int>>();
  s.edge_features = j.at("edge_features").get<std::vector<int>>();
  s.options = j.at("options").get<int>();
  s.loss = loss_mode_from(j.at("loss").get<std::string>());
  s.direction = direction_from(j.at("direction").get<std::string>());
  s.action_type = j.at("action_type").get<int>();
  const auto& g = j.at("graph");
  s.graph.types = g.at("types").get<std::vector<std::string>>();
  for (const auto& p : g.at("pairs")) s.graph.pairs.push_back({p.at("target").get<int>(), p.at("source").get<int>(), p.at("edges").get<bool>()});
  s.graph.feed_forward = g.at("feed_forward").get<std::vector<bool>>();
  return s;
}

Json model_config_to_json(const ModelConfig& c) {
  return Json{{"layers", c.backbone.layers},
              {"dim", c.backbone.dim},
              {"edge_dim", c.backbone.edge_dim},
              {"heads", c.backbone.heads},
              {"ff_dim", c.backbone.ff_dim},
              {"node_codes", c.codebook.node_codes},
              {"edge_codes", c.codebook.edge_codes},
              {"codebook_bypass", c.codebook.bypass},
              {"attention", c.attention.mode == AttentionMode::mixed ? "mixed" : "vanilla"},
              {"scale_scores", c.attention.scale_scores}};
}

ModelConfig model_config_from_json(const Json& j) {
  ModelConfig c;
  c.backbone = {j.at("layers").get<int>(), j.at("dim").get<int>(), j.at("edge_dim").get<int>(), j.at("heads").get<int>(),
                j.at("ff_dim").get<int>()};
  c.codebook = {j.at("node_codes").get<int>(), j.at("edge_codes").get<int>(), j.at("codebook_bypass").get<bool>()};
  const auto mode = j.at("attention").get<std::string>();
  if (mode != "mixed" && mode != "vanilla") throw DataError("unknown attention mode " + mode);
  c.attention.mode = mode == "mixed" ? AttentionMode::mixed : AttentionMode::vanilla;
  c.attention.scale_scores = j.at("scale_scores").get<bool>();
  return c;
}

template <typename T>
void save_checkpoint(const std::string& path, const Model<T>& model, const OptimState* optim, const Json& extra) {
  std::string payload;
  Json tensors = Json::array();
  std::uint64_t offset = 0;
  auto emit = [&](const std::string& name, const Shape& shape, auto const& values) {
    tensors.push_back(Json{{"name", name}, {"shape", shape}, {"offset", offset}});
    for (const auto& v : values) put_f32(payload, static_cast<float>(v));
    offset += values.size();
  };
  for (const auto& [name, t] : model.params()) emit(name, t.shape, t.values);
  Json manifest;
  manifest["format"] = "gencop-checkpoint";
  manifest["model"] = model_config_to_json(model.config());
  Json tasks = Json::array();
  for (const auto& [id, spec] : model.tasks()) tasks.push_back(task_to_json(spec));
  manifest["tasks"] = tasks;
  manifest["precision"] = sizeof(T) == 8 ? "float64" : "float32";
  manifest["parameter_count"] = offset;
  if (optim) {
    Json slots = Json::array();
    for (const auto& [name, s] : optim->slots) {
      slots.push_back(Json{{"name", name}, {"steps", s.steps}});
      emit("optim.m." + name, {s.m.size()}, s.m);
      emit("optim.v." + name, {s.v.size()}, s.v);
    }
    manifest["training"] = Json{{"step", optim->step}, {"epoch", optim->epoch}, {"slots", slots}};
  }
  manifest["tensors"] = tensors;
  manifest["payload_bytes"] = payload.size();
  manifest["payload_hash"] = hex(fnv1a64(payload));
  manifest["extra"] = extra;
  const std::string text = manifest.dump();
  std::string out(kMagic, 8);
  put_u32(out, kVersion);
  put_u64(out, text.size());
  out += text;
  put_u64(out, fnv1a64(text));
  out += payload;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw UsageError("cannot write checkpoint " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw UsageError("failed while writing checkpoint " + path);
}

CheckpointHeader read_checkpoint_header(const std::string& path) {
  auto p = parse(path);
  return {std::move(p.manifest), p.payload};
}

template <typename T>
Model<T> load_checkpoint(const std::string& path, OptimState* optim) {
  const auto p = parse(path);
  const auto& m = p.manifest;
  const auto cfg = model_config_from_json(m.at("model"));
  const auto* base = reinterpret_cast<const unsigned char*>(p.bytes.data() + p.payload);
  const std::size_t floats = m.at("payload_bytes").get<std::size_t>() / 4;
  auto read = [&](const Json& t, std::size_t n, auto* dst) {
    const auto off = t.at("offset").get<std::size_t>();
    if (off + n > floats) throw DataError(path + ": tensor " + t.at("name").get<std::string>() + " overruns the payload");
    for (std::size_t i = 0; i < n; ++i) {
      dst[i] = static_cast<std::remove_pointer_t<decltype(dst)>>(std::bit_cast<float>(get_u32(base + 4 * (off + i))));
    }
  };
  ParamStore<T> store;
  std::map<std::string, const Json*> optim_tensors;
  for (const auto& t : m.at("tensors")) {
    const auto name = t.at("name").get<std::string>();
    if (name.rfind("optim.", 0) == 0) {
      optim_tensors[name] = &t;
      continue;
    }
    auto& dst = store.add(name, t.at("shape").get<Shape>());
    read(t, dst.size(), dst.values.data());
  }
  std::map<std::string, TaskSpec> tasks;
  for (const auto& t : m.at("tasks")) {
    auto spec = task_from_json(t);
    tasks.emplace(spec.id, std::move(spec));
  }
  Model<T> model;
  model.adopt(cfg, std::move(store), std::move(tasks));
  if (optim && m.contains("training")) {
    const auto& tr = m.at("training");
    *optim = OptimState{};
    optim->step = tr.at("step").get<std::int64_t>();
    optim->epoch = tr.at("epoch").get<int>();
    for (const auto& s : tr.at("slots")) {
      const auto name = s.at("name").get<std::string>();
      auto& slot = optim->slots[name];
      slot.steps = s.at("steps").get<std::int64_t>();
      const Json& mt = *optim_tensors.at("optim.m." + name);
      const Json& vt = *optim_tensors.at("optim.v." + name);
      slot.m.resize(mt.at("shape").at(0).get<std::size_t>());
      slot.v.resize(vt.at("shape").at(0).get<std::size_t>());
      read(mt, slot.m.size(), slot.m.data());
      read(vt, slot.v.size(), slot.v.data());
    }
  }
  return model;
}

template void save_checkpoint<float>(const std::string&, const Model<float>&, const OptimState*, const Json&);
template void save_checkpoint<double>(const std::string&, const Model<double>&, const OptimState*, const Json&);
template Model<float> load_checkpoint<float>(const std::string&, OptimState*);
template Model<double> load_checkpoint<double>(const std::string&, OptimState*);

}  // namespace gencop
