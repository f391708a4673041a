#pragma once

#include <chrono>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace gencop::acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  std::function<Outcome()> run;
};

std::vector<Criterion> property_criteria();
std::vector<Criterion> training_criteria();

// Path of the CLI binary, for the reproducibility criterion.
const std::string& cli_path();

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

template <typename... Args>
std::string cat(const Args&... args) {
  std::ostringstream os;
  os.precision(4);
  (os << ... << args);
  return os.str();
}

}  // namespace gencop::acceptance
