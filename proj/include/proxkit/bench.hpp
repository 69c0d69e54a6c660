#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "proxkit/report.hpp"

namespace proxkit::bench {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr const char* kCsvSchema = "proxkit-csv v1";

// Raised for any config problem; what() is "<source>:<line>: <message>".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, std::size_t line, const std::string& message);
};

enum class ParamType { real, integer, boolean, text };

struct ParamSpec {
  std::string key;
  ParamType type;
  std::string default_value;
  std::string help;
};

struct ComponentSpec {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> params;
};

const std::vector<ComponentSpec>& problem_catalog();
const std::vector<ComponentSpec>& solver_catalog();

// A solver or problem choice with every parameter filled in (defaults
// applied, types validated).
struct Choice {
  std::string name;
  std::map<std::string, std::string> params;

  double real(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
};

struct ExperimentConfig {
  std::string source;
  std::string hash;  // FNV-1a 64 of the file bytes, hex
  Choice problem;
  Choice solver;
  std::optional<Choice> baseline;
  std::vector<std::uint64_t> seeds;
  std::string init_kind = "zero";
  double init_scale = 1.0;
  std::string output_dir = "proxkit-out";
  bool wall_clock = false;
  bool save_instances = false;
};

// Format: one "section.key = value" per line; '#' starts a comment.
ExperimentConfig parse_config(const std::string& text, const std::string& source);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string fnv1a_hex(const std::string& bytes);

// Per-iteration CSV: iter,objective,stationarity,grad_evals,wall_ns.
// wall_ns is written as 0 unless wall_clock is set.
void write_run_csv(std::ostream& out, const SolverReport& report, const std::string& comment, bool wall_clock);

// Median and quartiles (type-7 quantiles) across runs, aligned by row
// index; shorter runs are padded with their final row. Throws EmptyInput
// on an empty list.
struct SummaryRow {
  std::size_t iter = 0;
  double stationarity[3] = {0, 0, 0};  // q25, median, q75
  double objective[3] = {0, 0, 0};
  double grad_evals_median = 0.0;
};
std::vector<SummaryRow> summarize(const std::vector<const SolverReport*>& reports);

// CSV text with header
//   arm,iter,stationarity_median,stationarity_q25,stationarity_q75,
//   objective_median,objective_q25,objective_q75,grad_evals_median
std::string emit_summary(const std::vector<SolverReport>& reports, const std::string& arm = "solver");
std::string summary_header();
std::string summary_rows(const std::vector<SummaryRow>& rows, const std::string& arm);

double quantile(std::vector<double> values, double p);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::size_t jobs = 1;
  std::int64_t seed_offset = 0;
};

struct RunRecord {
  std::string arm;  // "solver" or "baseline"
  std::uint64_t seed = 0;
  std::string solver;
  std::string file;
  bool ok = false;
  std::string error;
  std::optional<SolverReport> report;
};

struct BundleResult {
  std::filesystem::path out_dir;
  std::vector<RunRecord> runs;
  bool all_ok() const;
};

// Runs one (arm, seed) pair; throws on solver failure.
SolverReport run_single(const ExperimentConfig& config, const Choice& solver, std::uint64_t seed);

// Runs every arm and seed, writes run CSVs, summary.csv and MANIFEST.
BundleResult run_experiment(const ExperimentConfig& config, const RunOptions& options);

}  // namespace proxkit::bench
