#include "rules.hpp"

#include <algorithm>

namespace gencop::detail {
namespace {

// Op nodes carry attr = [job, position, machine, duration]; machine nodes
// follow them. Each dispatched op starts once its job and machine are free.
class Shop : public Environment {
 public:
  Shop(std::string id, bool precedence) : precedence_(precedence) {
    spec_.id = std::move(id);
    spec_.node_features = {4, 2};
    spec_.edge_features = {precedence ? 2 : 1, 2, 0, 2};
    spec_.graph = TypeGraphConfig::job_shop();
    spec_.action_type = 0;
  }
  const TaskSpec& spec() const override { return spec_; }
  bool terminal(const Instance& s) const override {
    for (int j = 0; j < ops(s); ++j)
      if (s.live(j)) return false;
    return true;
  }
  bool legal(const Instance& s, Action a) const override {
    if (a.option != 0 || a.node < 0 || a.node >= ops(s) || !s.live(a.node)) return false;
    if (!precedence_) return true;
    // ops of a job are stored consecutively in processing order
    return s.attr(a.node, 1) == 0.0 || !s.live(a.node - 1);
  }
  double apply(Instance& s, Action a) const override {
    const auto job = static_cast<std::size_t>(s.attr(a.node, 0));
    const auto machine = static_cast<std::size_t>(s.attr(a.node, 2));
    const double end = std::max(s.job_ready[job], s.machine_ready[machine]) + s.attr(a.node, 3);
    s.job_ready[job] = end;
    s.machine_ready[machine] = end;
    s.alive[static_cast<std::size_t>(a.node)] = 0;
    const double cost = std::max(0.0, end - s.makespan);
    s.makespan = std::max(s.makespan, end);
    return cost;
  }
  void node_features(const Instance& s, int j, std::vector<double>& out) const override {
    out.push_back(s.data->id[static_cast<std::size_t>(j)]);
    if (j < ops(s)) {
      out.push_back(s.attr(j, 3) / 100.0);
      out.push_back((s.job_ready[static_cast<std::size_t>(s.attr(j, 0))] - s.makespan) / 100.0);
      out.push_back((s.machine_ready[static_cast<std::size_t>(s.attr(j, 2))] - s.makespan) / 100.0);
    } else {
      out.push_back((s.machine_ready[static_cast<std::size_t>(j - ops(s))] - s.makespan) / 100.0);
    }
  }
  void edge_features(const Instance& s, int pair, int source, int target, std::vector<double>& out) const override {
    if (pair == 0) {
      const bool same = s.attr(source, 0) == s.attr(target, 0);
      if (precedence_) out.push_back(same && s.attr(source, 1) < s.attr(target, 1) ? 1.0 : 0.0);
      out.push_back(same ? 1.0 : 0.0);
      return;
    }
    const int op = source < ops(s) ? source : target;
    const int machine = source < ops(s) ? target : source;
    const bool dep = static_cast<int>(s.attr(op, 2)) == machine - ops(s);
    out.push_back(dep ? 1.0 : 0.0);
    out.push_back(dep ? s.attr(op, 3) / 100.0 : 0.0);
  }

 private:
  static int ops(const Instance& s) { return s.data->jobs * s.data->machines; }
  TaskSpec spec_;
  bool precedence_;
};

// Jobs are assigned one at a time, hardest first (largest minimum duration,
// lowest index on ties); the action picks a machine for the current job.
class Umsp final : public Environment {
 public:
  Umsp() {
    spec_.id = "umsp";
    spec_.node_features = {2, 2};
    spec_.edge_features = {0, 1, 0, 1};
    spec_.graph = TypeGraphConfig::unrelated_machines();
    spec_.action_type = 1;
  }
  const TaskSpec& spec() const override { return spec_; }
  static int current_job(const Instance& s) {
    int best = -1;
    double best_min = -1.0;
    for (int j = 0; j < s.data->jobs; ++j) {
      if (!s.live(j)) continue;
      double mn = s.edge(j, s.data->jobs);
      for (int m = 1; m < s.data->machines; ++m) mn = std::min(mn, s.edge(j, s.data->jobs + m));
      if (mn > best_min) {
        best_min = mn;
        best = j;
      }
    }
    return best;
  }
  bool terminal(const Instance& s) const override { return current_job(s) < 0; }
  bool legal(const Instance& s, Action a) const override {
    return a.option == 0 && a.node >= s.data->jobs && a.node < s.n && current_job(s) >= 0;
  }
  double apply(Instance& s, Action a) const override {
    const int job = current_job(s);
    const auto m = static_cast<std::size_t>(a.node - s.data->jobs);
    s.machine_ready[m] += s.edge(job, a.node);
    s.alive[static_cast<std::size_t>(job)] = 0;
    const double cost = std::max(0.0, s.machine_ready[m] - s.makespan);
    s.makespan = std::max(s.makespan, s.machine_ready[m]);
    return cost;
  }
  void node_features(const Instance& s, int j, std::vector<double>& out) const override {
    out.push_back(s.data->id[static_cast<std::size_t>(j)]);
    if (j < s.data->jobs) {
      out.push_back(j == current_job(s) ? 1.0 : 0.0);
    } else {
      out.push_back((s.machine_ready[static_cast<std::size_t>(j - s.data->jobs)] - s.makespan) / 100.0);
    }
  }
  void edge_features(const Instance& s, int, int source, int target, std::vector<double>& out) const override {
    out.push_back(s.edge(source, target) / 100.0);
  }

 private:
  TaskSpec spec_;
};

}  // namespace

std::unique_ptr<Environment> make_jssp() { return std::make_unique<Shop>("jssp", true); }
std::unique_ptr<Environment> make_ossp() { return std::make_unique<Shop>("ossp", false); }
std::unique_ptr<Environment> make_umsp() { return std::make_unique<Umsp>(); }

}  // namespace gencop::detail
