#pragma once

#include <functional>
#include <string>

#include "gencop/tape.hpp"

namespace gencop {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;  // scalar entries compared
};

// Compares the analytic gradient of `f` against five-point central differences
// (steps epsilon / 4^j, j = 0..5; the most self-consistent
// one is used) for every parameter entry the tape reaches: |analytic - numeric| / (|numeric| + 1e-12).
// Parameters the loss does not reach are excluded. Throws NumericalError,
// naming the parameter, if a perturbed evaluation is not finite.
GradCheckReport finite_diff_check(const std::function<Var(Tape<double>&)>& f, ParamStore<double>& params,
                                  double epsilon = 1e-3);

// Same comparison with the differences taken on `wide`, an extended-precision
// copy of `params` (values are copied in first). Tiny entries of a loss of
// order one stay resolvable.
GradCheckReport finite_diff_check(const std::function<Var(Tape<double>&)>& f, ParamStore<double>& params,
                                  const std::function<Var(Tape<long double>&)>& wide_f,
                                  ParamStore<long double>& wide, double epsilon = 1e-3);

}  // namespace gencop
