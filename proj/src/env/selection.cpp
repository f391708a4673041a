#include "rules.hpp"

namespace gencop::detail {
namespace {

TaskSpec selection_spec(const std::string& id, int features, bool edges, Direction dir) {
  TaskSpec s;
  s.id = id;
  s.node_features = {features};
  s.edge_features = {edges ? 1 : 0};
  s.loss = LossMode::multi_class;
  s.direction = dir;
  s.graph = TypeGraphConfig::single_type(edges);
  return s;
}

// attr = [value, weight].
class Kp final : public Environment {
 public:
  Kp() : spec_(selection_spec("kp", 4, false, Direction::maximize)) {}
  const TaskSpec& spec() const override { return spec_; }
  bool terminal(const Instance& s) const override {
    for (int j = 0; j < s.n; ++j)
      if (legal(s, {j, 0})) return false;
    return true;
  }
  bool legal(const Instance& s, Action a) const override {
    return a.option == 0 && s.live(a.node) && s.attr(a.node, 1) <= s.remaining + kFeasTol;
  }
  double apply(Instance& s, Action a) const override {
    s.alive[static_cast<std::size_t>(a.node)] = 0;
    s.remaining -= s.attr(a.node, 1);
    return -s.attr(a.node, 0);
  }
  void node_features(const Instance& s, int j, std::vector<double>& out) const override {
    out.insert(out.end(), {s.data->id[static_cast<std::size_t>(j)], s.attr(j, 0), s.attr(j, 1), s.remaining});
  }
  void edge_features(const Instance&, int, int, int, std::vector<double>&) const override {}

 private:
  TaskSpec spec_;
};

class Graph : public Environment {
 public:
  explicit Graph(TaskSpec spec) : spec_(std::move(spec)) {}
  const TaskSpec& spec() const override { return spec_; }
  bool legal(const Instance& s, Action a) const override { return a.option == 0 && s.live(a.node); }
  void node_features(const Instance& s, int j, std::vector<double>& out) const override {
    out.push_back(s.data->id[static_cast<std::size_t>(j)]);
  }
  void edge_features(const Instance& s, int, int source, int target, std::vector<double>& out) const override {
    out.push_back(s.edge(source, target));
  }

 protected:
  TaskSpec spec_;
};

class Mvc final : public Graph {
 public:
  Mvc() : Graph(selection_spec("mvc", 1, true, Direction::minimize)) {}
  bool terminal(const Instance& s) const override {
    for (int i = 0; i < s.n; ++i) {
      if (!s.live(i)) continue;
      for (int j = i + 1; j < s.n; ++j)
        if (s.live(j) && s.edge(i, j) != 0.0) return false;
    }
    return true;
  }
  double apply(Instance& s, Action a) const override {
    s.alive[static_cast<std::size_t>(a.node)] = 0;
    return 1.0;
  }
};

class Mis final : public Graph {
 public:
  Mis() : Graph(selection_spec("mis", 1, true, Direction::maximize)) {}
  bool terminal(const Instance& s) const override { return s.live_count() == 0; }
  double apply(Instance& s, Action a) const override {
    for (int j = 0; j < s.n; ++j)
      if (s.edge(a.node, j) != 0.0) s.alive[static_cast<std::size_t>(j)] = 0;
    s.alive[static_cast<std::size_t>(a.node)] = 0;
    return -1.0;
  }
};

}  // namespace

std::unique_ptr<Environment> make_kp() { return std::make_unique<Kp>(); }
std::unique_ptr<Environment> make_mvc() { return std::make_unique<Mvc>(); }
std::unique_ptr<Environment> make_mis() { return std::make_unique<Mis>(); }

}  // namespace gencop::detail
