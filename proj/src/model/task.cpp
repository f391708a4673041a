#include "gencop/task.hpp"

#include "gencop/error.hpp"

namespace gencop {

int TypeGraphConfig::type_index(const std::string& name) const {
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (types[i] == name) return static_cast<int>(i);
  }
  return -1;
}

TypeGraphConfig TypeGraphConfig::single_type(bool edges) {
  return TypeGraphConfig{{"node"}, {{0, 0, edges}}, {true}};
}

TypeGraphConfig TypeGraphConfig::job_shop() {
  return TypeGraphConfig{{"op", "machine"}, {{0, 0, true}, {0, 1, true}, {1, 1, false}, {1, 0, true}}, {true, true}};
}

TypeGraphConfig TypeGraphConfig::unrelated_machines() {
  return TypeGraphConfig{{"job", "machine"}, {{0, 0, false}, {0, 1, true}, {1, 1, false}, {1, 0, true}}, {true, true}};
}

const char* to_string(LossMode m) { return m == LossMode::single_class ? "single-class" : "multi-class"; }
const char* to_string(Direction d) { return d == Direction::minimize ? "min" : "max"; }

LossMode loss_mode_from(const std::string& s) {
  if (s == "single-class") return LossMode::single_class;
  if (s == "multi-class") return LossMode::multi_class;
  throw DataError("unknown loss mode: " + s);
}

Direction direction_from(const std::string& s) {
  if (s == "min") return Direction::minimize;
  if (s == "max") return Direction::maximize;
  throw DataError("unknown direction: " + s);
}

}  // namespace gencop
