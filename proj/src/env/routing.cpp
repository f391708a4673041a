#include "rules.hpp"

namespace gencop::detail {
namespace {

// Shared origin / destination bookkeeping. A node is "open" when it is live
// and carries neither token.
class Routing : public Environment {
 public:
  explicit Routing(TaskSpec spec) : spec_(std::move(spec)) {}
  const TaskSpec& spec() const override { return spec_; }

  void edge_features(const Instance& s, int, int source, int target, std::vector<double>& out) const override {
    out.push_back(s.edge(source, target));
  }

 protected:
  static bool open(const Instance& s, int j) { return s.live(j) && j != s.origin && j != s.destination; }
  static int open_count(const Instance& s) {
    int c = 0;
    for (int j = 0; j < s.n; ++j) c += open(s, j) ? 1 : 0;
    return c;
  }
  // Moves the vehicle to j; the old origin leaves the instance unless it is
  // also the destination.
  static void move_to(Instance& s, int j) {
    if (s.origin != s.destination) s.alive[static_cast<std::size_t>(s.origin)] = 0;
    s.origin = j;
  }
  void tokens(const Instance& s, int j, std::vector<double>& out) const {
    out.push_back(s.data->id[static_cast<std::size_t>(j)]);
    out.push_back(j == s.origin ? 1.0 : 0.0);
    if (s.destination >= 0) out.push_back(j == s.destination ? 1.0 : 0.0);
  }

  TaskSpec spec_;
};

TaskSpec routing_spec(const std::string& id, int features, int options, Direction dir) {
  TaskSpec s;
  s.id = id;
  s.node_features = {features};
  s.edge_features = {1};
  s.options = options;
  s.direction = dir;
  s.graph = TypeGraphConfig::single_type(true);
  return s;
}

class Atsp final : public Routing {
 public:
  Atsp() : Routing(routing_spec("atsp", 3, 1, Direction::minimize)) {}
  bool terminal(const Instance& s) const override { return open_count(s) == 0; }
  bool legal(const Instance& s, Action a) const override { return a.option == 0 && open(s, a.node); }
  double apply(Instance& s, Action a) const override {
    double cost = s.edge(s.origin, a.node);
    move_to(s, a.node);
    if (open_count(s) == 0) cost += s.edge(a.node, s.destination);
    return cost;
  }
  void node_features(const Instance& s, int j, std::vector<double>& out) const override { tokens(s, j, out); }
};

// Repairman: cost of a leg is paid once by every customer still waiting.
class Trp final : public Routing {
 public:
  Trp() : Routing(routing_spec("trp", 2, 1, Direction::minimize)) {}
  bool terminal(const Instance& s) const override { return open_count(s) == 0; }
  bool legal(const Instance& s, Action a) const override { return a.option == 0 && open(s, a.node); }
  double apply(Instance& s, Action a) const override {
    const double cost = open_count(s) * s.edge(s.origin, a.node);
    s.alive[static_cast<std::size_t>(s.origin)] = 0;
    s.origin = a.node;
    return cost;
  }
  void node_features(const Instance& s, int j, std::vector<double>& out) const override { tokens(s, j, out); }
};

// attr = [x, y, demand]; option 1 routes through the depot first.
class Cvrp final : public Routing {
 public:
  Cvrp() : Routing(routing_spec("cvrp", 5, 2, Direction::minimize)) {}
  bool terminal(const Instance& s) const override { return open_count(s) == 0; }
  bool legal(const Instance& s, Action a) const override {
    if (!open(s, a.node)) return false;
    if (a.option == 1) return true;
    return a.option == 0 && s.attr(a.node, 2) <= s.remaining + kFeasTol;
  }
  double apply(Instance& s, Action a) const override {
    const double demand = s.attr(a.node, 2);
    double cost;
    if (a.option == 0) {
      cost = s.edge(s.origin, a.node);
      s.remaining -= demand;
    } else {
      cost = s.edge(s.origin, s.destination) + s.edge(s.destination, a.node);
      s.remaining = s.data->capacity - demand;
    }
    move_to(s, a.node);
    if (open_count(s) == 0) cost += s.edge(a.node, s.destination);
    return cost;
  }
  void node_features(const Instance& s, int j, std::vector<double>& out) const override {
    tokens(s, j, out);
    const double q = s.data->capacity;
    out.push_back(j == s.destination ? 0.0 : s.attr(j, 2) / q);
    out.push_back(s.remaining / q);
  }
};

// attr = [x, y, prize]; selecting the depot ends the tour.
class Op final : public Routing {
 public:
  Op() : Routing(routing_spec("op", 5, 1, Direction::maximize)) {}
  bool terminal(const Instance& s) const override { return s.done; }
  bool legal(const Instance& s, Action a) const override {
    if (a.option != 0 || s.done) return false;
    if (a.node == s.destination) return true;
    return open(s, a.node) && s.edge(s.origin, a.node) + s.edge(a.node, s.destination) <= s.remaining + kFeasTol;
  }
  double apply(Instance& s, Action a) const override {
    if (a.node == s.destination) {
      s.remaining -= s.edge(s.origin, s.destination);
      s.done = true;
      return 0.0;
    }
    s.remaining -= s.edge(s.origin, a.node);
    move_to(s, a.node);
    return -s.attr(a.node, 2);
  }
  void node_features(const Instance& s, int j, std::vector<double>& out) const override {
    tokens(s, j, out);
    out.push_back(j == s.destination ? 0.0 : s.attr(j, 2));
    out.push_back(s.remaining);
  }
};

// attr = [x, y, prize, penalty]; the depot closes the tour once the prize
// requirement is met and pays the penalties of every unvisited node.
class Pctsp final : public Routing {
 public:
  Pctsp() : Routing(routing_spec("pctsp", 6, 1, Direction::minimize)) {}
  bool terminal(const Instance& s) const override { return s.done; }
  bool legal(const Instance& s, Action a) const override {
    if (a.option != 0 || s.done) return false;
    if (a.node == s.destination) return s.remaining <= kFeasTol;
    return open(s, a.node);
  }
  double apply(Instance& s, Action a) const override {
    if (a.node == s.destination) {
      double cost = s.edge(s.origin, s.destination);
      for (int j = 0; j < s.n; ++j)
        if (open(s, j)) cost += s.attr(j, 3);
      s.done = true;
      return cost;
    }
    const double cost = s.edge(s.origin, a.node);
    s.remaining -= s.attr(a.node, 2);
    move_to(s, a.node);
    return cost;
  }
  void node_features(const Instance& s, int j, std::vector<double>& out) const override {
    tokens(s, j, out);
    const bool depot = j == s.destination;
    out.push_back(depot ? 0.0 : s.attr(j, 2));
    out.push_back(depot ? 0.0 : s.attr(j, 3));
    out.push_back(std::max(s.remaining, 0.0));
  }
};

}  // namespace

std::unique_ptr<Environment> make_atsp() { return std::make_unique<Atsp>(); }
std::unique_ptr<Environment> make_trp() { return std::make_unique<Trp>(); }
std::unique_ptr<Environment> make_cvrp() { return std::make_unique<Cvrp>(); }
std::unique_ptr<Environment> make_op() { return std::make_unique<Op>(); }
std::unique_ptr<Environment> make_pctsp() { return std::make_unique<Pctsp>(); }

}  // namespace gencop::detail
