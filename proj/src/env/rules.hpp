#pragma once

#include <memory>

#include "gencop/env.hpp"

namespace gencop::detail {

constexpr double kFeasTol = 1e-9;

std::unique_ptr<Environment> make_atsp();
std::unique_ptr<Environment> make_trp();
std::unique_ptr<Environment> make_cvrp();
std::unique_ptr<Environment> make_op();
std::unique_ptr<Environment> make_pctsp();
std::unique_ptr<Environment> make_kp();
std::unique_ptr<Environment> make_mvc();
std::unique_ptr<Environment> make_mis();
std::unique_ptr<Environment> make_jssp();
std::unique_ptr<Environment> make_ossp();
std::unique_ptr<Environment> make_umsp();

}  // namespace gencop::detail
