#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "proxkit/bench.hpp"
#include "proxkit/errors.hpp"
#include "proxkit/text.hpp"

namespace proxkit::bench {

void write_run_csv(std::ostream& out, const SolverReport& report, const std::string& comment, bool wall_clock) {
  out << "# " << comment << '\n';
  out << "iter,objective,stationarity,grad_evals,wall_ns\n";
  for (std::size_t k = 0; k < report.size(); ++k) {
    out << report.iteration[k] << ',' << format_double(report.objective[k]) << ','
        << format_double(report.stationarity[k]) << ',' << report.grad_evals[k] << ','
        << (wall_clock ? report.wall_ns[k] : 0) << '\n';
  }
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw EmptyInput("quantile: no values");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<SummaryRow> summarize(const std::vector<const SolverReport*>& reports) {
  if (reports.empty()) throw EmptyInput("summarize: no reports");
  std::size_t rows = 0;
  const SolverReport* longest = reports.front();
  for (const auto* r : reports) {
    if (r->size() == 0) throw EmptyInput("summarize: report '" + r->solver + "' has no history");
    if (r->size() > rows) {
      rows = r->size();
      longest = r;
    }
  }
  std::vector<SummaryRow> out(rows);
  std::vector<double> stat(reports.size()), obj(reports.size()), evals(reports.size());
  for (std::size_t k = 0; k < rows; ++k) {
    for (std::size_t s = 0; s < reports.size(); ++s) {
      const auto& r = *reports[s];
      const std::size_t row = std::min(k, r.size() - 1);
      stat[s] = r.stationarity[row];
      obj[s] = r.objective[row];
      evals[s] = static_cast<double>(r.grad_evals[row]);
    }
    SummaryRow& row = out[k];
    row.iter = longest->iteration[k];
    row.stationarity[0] = quantile(stat, 0.25);
    row.stationarity[1] = quantile(stat, 0.5);
    row.stationarity[2] = quantile(stat, 0.75);
    row.objective[0] = quantile(obj, 0.25);
    row.objective[1] = quantile(obj, 0.5);
    row.objective[2] = quantile(obj, 0.75);
    row.grad_evals_median = quantile(evals, 0.5);
  }
  return out;
}

std::string summary_header() {
  return "arm,iter,stationarity_median,stationarity_q25,stationarity_q75,"
         "objective_median,objective_q25,objective_q75,grad_evals_median\n";
}

std::string summary_rows(const std::vector<SummaryRow>& rows, const std::string& arm) {
  std::ostringstream out;
  for (const auto& r : rows) {
    out << arm << ',' << r.iter << ',' << format_double(r.stationarity[1]) << ','
        << format_double(r.stationarity[0]) << ',' << format_double(r.stationarity[2]) << ','
        << format_double(r.objective[1]) << ',' << format_double(r.objective[0]) << ','
        << format_double(r.objective[2]) << ',' << format_double(r.grad_evals_median) << '\n';
  }
  return out.str();
}

std::string emit_summary(const std::vector<SolverReport>& reports, const std::string& arm) {
  if (reports.empty()) throw EmptyInput("emit_summary: no reports");
  std::vector<const SolverReport*> ptrs;
  for (const auto& r : reports) ptrs.push_back(&r);
  return summary_header() + summary_rows(summarize(ptrs), arm);
}

}  // namespace proxkit::bench
