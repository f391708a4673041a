#include "gencop/gradcheck.hpp"

#include <cmath>

namespace gencop {

namespace {
constexpr int kSteps = 6;

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1e-2)) throw UsageError("finite_diff_check: epsilon must lie in (0, 1e-2]");
}

void analytic_pass(const std::function<Var(Tape<double>&)>& f, ParamStore<double>& params) {
  params.zero_grad();
  Tape<double> tape;
  Var loss = f(tape);
  if (!std::isfinite(tape.item(loss))) throw NumericalError("finite_diff_check: loss is not finite");
  tape.backward(loss);
}

// Perturbs entry i of `tensor` (living in the store `f` reads) and compares
// against analytic[i].
template <typename T>
void compare(const std::function<Var(Tape<T>&)>& f, const std::string& name, Tensor<T>& tensor,
             const std::vector<double>& analytic, double epsilon, GradCheckReport& report) {
  auto eval = [&]() {
    Tape<T> tape(false);
    const T v = tape.item(f(tape));
    if (!std::isfinite(static_cast<double>(v)))
      throw NumericalError("finite_diff_check: non-finite loss while perturbing " + name);
    return v;
  };
  for (std::size_t i = 0; i < tensor.size(); ++i) {
    const T saved = tensor.values[i];
    auto at = [&](T h) {
      tensor.values[i] = saved + h;
      return eval();
    };
    // Five-point estimates at shrinking steps; keep the step whose estimate
    // agrees best with the next smaller one (avoids kinks at large steps and
    // roundoff at small ones).
    double est[kSteps];
    for (int j = 0; j < kSteps; ++j) {
      const T h = static_cast<T>(epsilon) / static_cast<T>(std::pow(4.0, j));
      const T d1 = at(h) - at(-h);
      const T d2 = at(2 * h) - at(-2 * h);
      est[j] = static_cast<double>((8 * d1 - d2) / (12 * h));
    }
    tensor.values[i] = saved;
    int best = 0;
    for (int j = 1; j + 1 < kSteps; ++j) {
      if (std::abs(est[j] - est[j + 1]) < std::abs(est[best] - est[best + 1])) best = j;
    }
    const double numeric = est[best];
    const double err = std::abs(analytic[i] - numeric) / (std::abs(numeric) + 1e-12);
    ++report.checked;
    if (report.worst_param.empty() || err > report.max_rel_error) {
      report.max_rel_error = err;
      report.worst_param = name;
      report.worst_index = i;
      report.worst_analytic = analytic[i];
      report.worst_numeric = numeric;
    }
  }
}

}  // namespace

GradCheckReport finite_diff_check(const std::function<Var(Tape<double>&)>& f, ParamStore<double>& params,
                                  double epsilon) {
  check_epsilon(epsilon);
  analytic_pass(f, params);
  GradCheckReport report;
  for (auto& [name, tensor] : params) {
    if (!tensor.touched) continue;
    const std::vector<double> analytic = tensor.grad;
    compare<double>(f, name, tensor, analytic, epsilon, report);
  }
  return report;
}

GradCheckReport finite_diff_check(const std::function<Var(Tape<double>&)>& f, ParamStore<double>& params,
                                  const std::function<Var(Tape<long double>&)>& wide_f,
                                  ParamStore<long double>& wide, double epsilon) {
  check_epsilon(epsilon);
  for (auto& [name, tensor] : params) {
    if (!wide.contains(name) || wide.at(name).size() != tensor.size())
      throw UsageError("finite_diff_check: extended store does not mirror " + name);
    auto& w = wide.at(name);
    for (std::size_t i = 0; i < tensor.size(); ++i) w.values[i] = tensor.values[i];
  }
  analytic_pass(f, params);
  GradCheckReport report;
  for (auto& [name, tensor] : params) {
    if (!tensor.touched) continue;
    compare<long double>(wide_f, name, wide.at(name), tensor.grad, epsilon, report);
  }
  return report;
}

}  // namespace gencop
