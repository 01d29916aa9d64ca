// Acceptance suite: runs every verification criterion on the reference
// configuration and prints one pass/fail line per criterion. Exit code is the
// number of failing criteria.

#include <cstring>
#include <iostream>
#include <string>

#include "scl/config.hpp"
#include "scl/report.hpp"

int main(int argc, char** argv) {
  std::string config_path;
  scl::report::AcceptanceOptions opts;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--config") && i + 1 < argc) config_path = argv[++i];
    else if (!std::strcmp(argv[i], "--out") && i + 1 < argc) opts.out_dir = argv[++i];
    else if (!std::strcmp(argv[i], "--edge") && i + 1 < argc) opts.fem_edge = std::stod(argv[++i]);
    else if (!std::strcmp(argv[i], "--jobs") && i + 1 < argc) opts.jobs = std::stoi(argv[++i]);
  }
  scl::TwoPhaseDiskConfig cfg =
      config_path.empty() ? scl::reference_config() : scl::load_config(config_path);
  try {
    scl::report::AcceptanceRun run(cfg, opts);
    auto results = run.run();
    return scl::report::print_results(results, std::cout);
  } catch (const scl::error& e) {
    std::cerr << "acceptance suite aborted: " << e.what() << "\n";
    return 99;
  }
}
