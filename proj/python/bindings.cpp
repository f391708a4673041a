#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gencop/io.hpp"
#include "gencop/oracle.hpp"
#include "gencop/trainer.hpp"

namespace py = pybind11;
using namespace gencop;

// Instances and reports cross the boundary as JSON text; the Python side
// wraps them with json.loads / json.dumps.
namespace {

using Net = Model<float>;

Instance parse_instance(const std::string& text) { return instance_from_json(Json::parse(text)); }

std::vector<Trajectory> references(const std::vector<std::string>& instances) {
  std::vector<Trajectory> out;
  for (const auto& text : instances) {
    const auto inst = parse_instance(text);
    out.push_back(trajectory_from_solution(inst, solve(inst)));
  }
  return out;
}

std::vector<Trajectory> oracle_data(const std::string& task, int n, int count, std::uint64_t seed, int machines) {
  GenConfig g;
  g.task = task;
  g.n = n;
  g.count = count;
  g.seed = seed;
  g.machines = machines;
  std::vector<Trajectory> out;
  for (const auto& inst : generate(g)) out.push_back(trajectory_from_solution(inst, solve(inst)));
  return out;
}

Net make_model(const std::string& preset, std::uint64_t seed, const std::vector<std::string>& tasks) {
  RunConfig rc;
  rc.preset = preset;
  if (preset != "desk" && preset != "paper") throw UsageError("preset must be desk or paper");
  Net m(model_config_for(rc), seed);
  for (const auto& t : tasks) m.register_task(task_spec(t), seed);
  return m;
}

std::string solve_json(const std::string& text, bool heuristic) {
  const auto inst = parse_instance(text);
  const auto sol = heuristic ? solve_heuristic(inst) : solve(inst);
  return solution_to_json(sol).dump();
}

}  // namespace

PYBIND11_MODULE(_gencop, m) {
  m.doc() = "gencop native core";
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("task_ids", &task_ids);
  m.def(
      "generate",
      [](const std::string& task, int n, int count, std::uint64_t seed, int machines, double capacity) {
        GenConfig g;
        g.task = task;
        g.n = n;
        g.count = count;
        g.seed = seed;
        g.machines = machines;
        g.capacity = capacity;
        std::vector<std::string> out;
        for (const auto& inst : generate(g)) out.push_back(instance_to_json(inst).dump());
        return out;
      },
      py::arg("task"), py::arg("n"), py::arg("count") = 1, py::arg("seed") = 0, py::arg("machines") = 3,
      py::arg("capacity") = 0.0);
  m.def("solve", [](const std::string& inst) { return solve_json(inst, false); });
  m.def("solve_heuristic", [](const std::string& inst) { return solve_json(inst, true); });

  py::class_<Net>(m, "Model")
      .def(py::init(&make_model), py::arg("preset") = "desk", py::arg("seed") = 1,
           py::arg("tasks") = std::vector<std::string>{})
      .def_static("load", [](const std::string& path) { return load_checkpoint<float>(path); })
      .def("save", [](const Net& self, const std::string& path) { save_checkpoint(path, self); })
      .def("register_task", [](Net& self, const std::string& task, std::uint64_t seed) {
        self.register_task(task_spec(task), seed);
      }, py::arg("task"), py::arg("seed") = 1)
      .def_property_readonly("tasks", [](const Net& self) {
        std::vector<std::string> out;
        for (const auto& [id, _] : self.tasks()) out.push_back(id);
        return out;
      })
      .def_property_readonly("parameter_count", [](const Net& self) { return self.params().count(); })
      .def(
          "train",
          [](Net& self, const std::string& task, int n, int trajectories, int epochs, int batch, double lr,
             std::uint64_t seed, int machines) {
            TaskData d;
            d.train = oracle_data(task, n, trajectories, seed, machines);
            d.valid = oracle_data(task, n, std::max(1, trajectories / 10), seed + 1, machines);
            TrainConfig cfg;
            cfg.epochs = epochs;
            cfg.batch = batch;
            cfg.learning_rate = lr;
            cfg.seed = seed;
            OptimState st;
            std::vector<std::string> metrics;
            const auto r = train_multitask(self, {{task, d}}, cfg, st,
                                           [&](const Metric& mt) { metrics.push_back(metric_to_json(mt).dump()); });
            self.adopt(self.config(), r.best, self.tasks());
            return metrics;
          },
          py::arg("task"), py::arg("n"), py::arg("trajectories"), py::arg("epochs") = 1, py::arg("batch") = 32,
          py::arg("lr") = 5e-4, py::arg("seed") = 0, py::arg("machines") = 3,
          py::call_guard<py::gil_scoped_release>())
      .def(
          "evaluate",
          [](Net& self, const std::string& task, const std::vector<std::string>& instances) {
            const auto refs = references(instances);
            return gap_report_to_json(evaluate(self, task, refs)).dump();
          },
          py::arg("task"), py::arg("instances"))
      .def(
          "decode",
          [](Net& self, const std::string& inst) {
            const auto start = parse_instance(inst);
            const auto traj = rollout(start, model_policy(self, start.task), Decode::greedy, 0);
            std::vector<std::pair<int, int>> actions;
            for (const auto& a : traj.actions) actions.emplace_back(a.node, a.option);
            Json j{{"objective", traj.objective}, {"actions", actions}};
            return j.dump();
          },
          py::arg("instance"));
}
