#include <algorithm>
#include <exception>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "common.hpp"

namespace gencop::acceptance {

const std::string& cli_path() {
  static const std::string path = GENCOP_CLI_PATH;
  return path;
}

}  // namespace gencop::acceptance

int main(int argc, char** argv) {
  using namespace gencop::acceptance;
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  app.add_option("--criteria", only, "criterion numbers to run (default: all)")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  auto all = property_criteria();
  for (auto& c : training_criteria()) all.push_back(std::move(c));
  std::sort(all.begin(), all.end(), [](const Criterion& a, const Criterion& b) { return a.id < b.id; });
  const std::set<int> wanted(only.begin(), only.end());

  int failed = 0, ran = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    ++ran;
    Outcome o;
    Stopwatch clock;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << "criterion " << c.id << " [" << c.title << "]: " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail
              << " [" << cat(clock.seconds()) << " s]" << std::endl;
  }
  if (ran == 0) {
    std::cerr << "no criterion selected\n";
    return 1;
  }
  return failed == 0 ? 0 : 1;
}
