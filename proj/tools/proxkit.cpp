#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "proxkit/bench.hpp"
#include "proxkit/text.hpp"

namespace {

void list(const std::vector<proxkit::bench::ComponentSpec>& catalog) {
  for (const auto& c : catalog) {
    std::cout << c.name << "  " << c.summary << '\n';
    for (const auto& p : c.params) {
      std::cout << "    " << p.key << " = " << p.default_value;
      if (!p.help.empty()) std::cout << "    # " << p.help;
      std::cout << '\n';
    }
  }
}

std::int64_t seed_offset_from_env() {
  const char* raw = std::getenv("PROXKIT_SEED_OFFSET");
  if (raw == nullptr || *raw == '\0') return 0;
  const auto v = proxkit::parse_int(proxkit::trim(raw));
  if (!v) throw std::invalid_argument(std::string("PROXKIT_SEED_OFFSET must be an integer, got '") + raw + "'");
  return *v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proxkit: proximal methods for weakly convex problems"};
  app.require_subcommand(1);
  auto* run = app.add_subcommand("run", "run an experiment config and write a CSV bundle");
  std::string config_path;
  std::string out_dir;
  std::size_t jobs = 1;
  bool list_problems = false;
  bool list_solvers = false;
  run->add_option("config", config_path, "experiment config file");
  run->add_option("--out", out_dir, "output directory (overrides output.dir)");
  run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--list-problems", list_problems, "list problem generators and their parameters");
  run->add_flag("--list-solvers", list_solvers, "list solvers and their parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list_problems || list_solvers) {
    if (list_problems) list(proxkit::bench::problem_catalog());
    if (list_solvers) list(proxkit::bench::solver_catalog());
    return 0;
  }
  if (config_path.empty()) {
    std::cerr << "proxkit run: missing config path\n";
    return 2;
  }

  proxkit::bench::RunOptions options;
  options.jobs = jobs;
  if (!out_dir.empty()) options.out_dir = out_dir;
  proxkit::bench::ExperimentConfig config;
  try {
    options.seed_offset = seed_offset_from_env();
    config = proxkit::bench::load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }

  try {
    const auto bundle = proxkit::bench::run_experiment(config, options);
    std::size_t failed = 0;
    for (const auto& r : bundle.runs) {
      if (r.ok) continue;
      ++failed;
      std::cerr << "run " << r.arm << " seed " << r.seed << " (" << r.solver << ") failed: " << r.error << '\n';
    }
    std::cout << "wrote " << bundle.runs.size() - failed << " of " << bundle.runs.size() << " runs to "
              << bundle.out_dir.string() << '\n';
    return failed == 0 ? 0 : 3;
  } catch (const std::exception& e) {
    std::cerr << "proxkit run: " << e.what() << '\n';
    return 3;
  }
}
