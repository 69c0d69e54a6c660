#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "proxkit/vector.hpp"

namespace proxkit {

// Oracle call counters. Each solver names one of them as its primary
// complexity unit (see SolverReport::primary_counter).
struct OracleCounters {
  std::uint64_t value = 0;
  std::uint64_t subgradient = 0;
  std::uint64_t component_gradient = 0;
  std::uint64_t prox = 0;
  std::uint64_t map_eval = 0;
  std::uint64_t jvp = 0;
  std::uint64_t vjp = 0;
  std::uint64_t inner_iterations = 0;

  std::uint64_t get(const std::string& name) const;
  OracleCounters& operator+=(const OracleCounters& o);
};

struct SolverReport {
  std::string solver;
  std::string primary_counter = "component_gradient";

  // One entry per recorded iteration; all four histories have equal length.
  std::vector<std::size_t> iteration;
  std::vector<double> objective;
  std::vector<double> stationarity;
  std::vector<std::uint64_t> grad_evals;
  std::vector<std::int64_t> wall_ns;

  // Iterates thinned by iterate_stride (0 disables storage).
  std::size_t iterate_stride = 0;
  std::vector<std::size_t> iterate_index;
  std::vector<Vector> iterates;

  OracleCounters counters;
  Vector final_point;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config_echo;
  std::string status;
  // Extra points a solver singles out, e.g. "best" and "selected".
  std::vector<std::pair<std::string, Vector>> named_points;

  std::size_t size() const { return iteration.size(); }
  bool consistent() const;
  const Vector* named_point(const std::string& name) const;
};

// Appends history rows to a report and keeps the wall clock.
class ReportRecorder {
 public:
  explicit ReportRecorder(SolverReport& report)
      : report_(report), start_(std::chrono::steady_clock::now()) {}

  void record(std::size_t iter, double objective, double stationarity);
  void store_iterate(std::size_t iter, const Vector& x);

 private:
  SolverReport& report_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace proxkit
