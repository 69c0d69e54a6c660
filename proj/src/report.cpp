#include "proxkit/report.hpp"

#include <stdexcept>

namespace proxkit {

std::uint64_t OracleCounters::get(const std::string& name) const {
  if (name == "value") return value;
  if (name == "subgradient") return subgradient;
  if (name == "component_gradient") return component_gradient;
  if (name == "prox") return prox;
  if (name == "map_eval") return map_eval;
  if (name == "jvp") return jvp;
  if (name == "vjp") return vjp;
  if (name == "inner_iterations") return inner_iterations;
  throw std::invalid_argument("unknown oracle counter '" + name + "'");
}

OracleCounters& OracleCounters::operator+=(const OracleCounters& o) {
  value += o.value;
  subgradient += o.subgradient;
  component_gradient += o.component_gradient;
  prox += o.prox;
  map_eval += o.map_eval;
  jvp += o.jvp;
  vjp += o.vjp;
  inner_iterations += o.inner_iterations;
  return *this;
}

bool SolverReport::consistent() const {
  const auto n = iteration.size();
  return objective.size() == n && stationarity.size() == n && grad_evals.size() == n &&
         wall_ns.size() == n && iterate_index.size() == iterates.size();
}

const Vector* SolverReport::named_point(const std::string& name) const {
  for (const auto& [key, point] : named_points)
    if (key == name) return &point;
  return nullptr;
}

void ReportRecorder::record(std::size_t iter, double objective, double stationarity) {
  report_.iteration.push_back(iter);
  report_.objective.push_back(objective);
  report_.stationarity.push_back(stationarity);
  report_.grad_evals.push_back(report_.counters.get(report_.primary_counter));
  const auto elapsed = std::chrono::steady_clock::now() - start_;
  report_.wall_ns.push_back(std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed).count());
}

void ReportRecorder::store_iterate(std::size_t iter, const Vector& x) {
  if (report_.iterate_stride == 0 || iter % report_.iterate_stride != 0) return;
  report_.iterate_index.push_back(iter);
  report_.iterates.push_back(x);
}

}  // namespace proxkit
