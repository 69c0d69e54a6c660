#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "proxkit/bench.hpp"
#include "proxkit/text.hpp"

namespace proxkit::bench {

ConfigError::ConfigError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message) {}

namespace {

using P = ParamType;

std::vector<ParamSpec> stopping(const char* iters, const char* eps) {
  return {{"iters", P::integer, iters, "iteration cap"},
          {"eps", P::real, eps, "stop once f - f* <= eps"},
          {"use_fstar", P::boolean, "true", "measure f - f* against the instance optimum"},
          {"record_every", P::integer, "1", "history thinning"}};
}

std::vector<ParamSpec> catalyst_params() {
  std::vector<ParamSpec> params = {{"iters", P::integer, "100000", "outer iteration cap"},
                                   {"eps", P::real, "1e-6", "stop once f - f* <= eps"},
                                   {"use_fstar", P::boolean, "true", "measure f - f* against the instance optimum"}};
  params.push_back({"kappa", P::real, "auto", "smoothing parameter; auto uses choose_kappa"});
  params.push_back({"inner_budget", P::integer, "100000000", "component gradients per subproblem"});
  params.push_back({"warm_start", P::text, "prev", "prev | extrapolated"});
  return params;
}

}  // namespace

const std::vector<ComponentSpec>& problem_catalog() {
  static const std::vector<ComponentSpec> catalog = {
      {"phase_retrieval",
       "robust phase retrieval (composite, stochastic)",
       {{"d", P::integer, "20", ""}, {"m", P::integer, "160", ""}, {"outlier_frac", P::real, "0", ""}}},
      {"robust_pca",
       "robust low-rank factorization (composite)",
       {{"rows", P::integer, "20", ""},
        {"cols", P::integer, "20", ""},
        {"rank", P::integer, "2", ""},
        {"sparsity", P::real, "0.05", ""}}},
      {"z2_sync",
       "Z2 synchronization (composite)",
       {{"d", P::integer, "20", ""}, {"edge_prob", P::real, "0.5", ""}, {"flip_prob", P::real, "0.05", ""}}},
      {"box_nls", "box-constrained nonlinear equations (composite)", {{"d", P::integer, "10", ""}, {"m", P::integer, "12", ""}}},
      {"lasso",
       "l1-regularized least squares (composite)",
       {{"d", P::integer, "50", ""}, {"m", P::integer, "100", ""}, {"lambda", P::real, "0.1", ""}}},
      {"erm_logistic",
       "l2-regularized logistic regression (finite sum)",
       {{"d", P::integer, "20", ""}, {"m", P::integer, "200", ""}, {"mu", P::real, "1e-3", ""}}},
      {"ridge",
       "ridge regression (finite sum)",
       {{"d", P::integer, "50", ""}, {"m", P::integer, "500", ""}, {"condition", P::real, "1e4", "beta / mu"}}},
  };
  return catalog;
}

const std::vector<ComponentSpec>& solver_catalog() {
  static const std::vector<ComponentSpec> catalog = {
      {"proxlinear",
       "prox-linear method (composite)",
       {{"iters", P::integer, "100", ""},
        {"tol", P::real, "1e-8", "stop at |G| <= tol"},
        {"inner_tol", P::real, "0", "subproblem gap; 0 means tol/100"},
        {"beta", P::real, "0", "penalty; 0 means L * beta"}}},
      {"proxpoint",
       "proximal point method (composite)",
       {{"iters", P::integer, "100", ""},
        {"tol", P::real, "1e-8", ""},
        {"nu", P::real, "0", "0 means 1/(2 rho)"},
        {"inner_tol", P::real, "1e-10", ""}}},
      {"pgsg",
       "proximally guided stochastic subgradient (stochastic)",
       {{"iters", P::integer, "100", "outer iterations"},
        {"record_every", P::integer, "10", "stationarity grid"},
        {"stat_inner_tol", P::real, "1e-8", ""}}},
      {"catalyst-gd", "Catalyst around gradient descent (finite sum)", catalyst_params()},
      {"catalyst-prox_gd", "Catalyst around proximal gradient (finite sum)", catalyst_params()},
      {"catalyst-svrg", "Catalyst around SVRG (finite sum)", catalyst_params()},
      {"gd", "gradient descent (finite sum)", stopping("10000000", "1e-6")},
      {"prox_gd", "proximal gradient descent (finite sum)", stopping("10000000", "1e-6")},
      {"svrg", "SVRG epochs (finite sum)", stopping("100000", "1e-6")},
  };
  return catalog;
}

double Choice::real(const std::string& key) const { return *parse_double(params.at(key)); }
std::int64_t Choice::integer(const std::string& key) const { return *parse_int(params.at(key)); }
bool Choice::boolean(const std::string& key) const { return params.at(key) == "true"; }

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
};

bool valid_value(ParamType type, const std::string& value) {
  switch (type) {
    case ParamType::real: {
      const auto v = parse_double(value);
      return v && std::isfinite(*v);
    }
    case ParamType::integer: return parse_int(value).has_value();
    case ParamType::boolean: return value == "true" || value == "false";
    case ParamType::text: return !value.empty();
  }
  return false;
}

const char* type_name(ParamType type) {
  switch (type) {
    case ParamType::real: return "a real number";
    case ParamType::integer: return "an integer";
    case ParamType::boolean: return "true or false";
    case ParamType::text: return "a word";
  }
  return "";
}

enum class Structure { composite, stochastic, finite_sum };

bool problem_has(const std::string& problem, Structure s) {
  switch (s) {
    case Structure::composite: return problem != "erm_logistic" && problem != "ridge";
    case Structure::stochastic: return problem == "phase_retrieval";
    case Structure::finite_sum: return problem == "erm_logistic" || problem == "ridge";
  }
  return false;
}

Structure solver_needs(const std::string& solver) {
  if (solver == "proxlinear" || solver == "proxpoint") return Structure::composite;
  if (solver == "pgsg") return Structure::stochastic;
  return Structure::finite_sum;
}

const char* structure_name(Structure s) {
  switch (s) {
    case Structure::composite: return "a composite problem";
    case Structure::stochastic: return "a stochastic problem";
    case Structure::finite_sum: return "a finite-sum problem";
  }
  return "";
}

class Parser {
 public:
  Parser(const std::string& text, std::string source) : source_(std::move(source)) {
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
      ++line;
      std::string_view s = raw;
      if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
      s = trim(s);
      if (s.empty()) continue;
      const auto eq = s.find('=');
      if (eq == std::string_view::npos) fail(line, "expected 'key = value'");
      const std::string key(trim(s.substr(0, eq)));
      const std::string value(trim(s.substr(eq + 1)));
      if (key.empty()) fail(line, "empty key");
      if (value.empty()) fail(line, "empty value for '" + key + "'");
      if (entries_.contains(key))
        fail(line, "duplicate key '" + key + "' (first set on line " + std::to_string(entries_[key].line) + ")");
      entries_[key] = {value, line};
    }
  }

  ExperimentConfig build() {
    ExperimentConfig config;
    config.source = source_;
    config.problem = choice("problem", problem_catalog(), true).value();
    config.solver = choice("solver", solver_catalog(), true).value();
    config.baseline = choice("baseline", solver_catalog(), false);
    check_structure(config.problem.name, "solver", config.solver.name);
    if (config.baseline) check_structure(config.problem.name, "baseline", config.baseline->name);
    check_text("solver", config.solver);
    if (config.baseline) check_text("baseline", *config.baseline);

    config.seeds = seeds();
    if (auto e = take("init.kind")) {
      if (e->value != "zero" && e->value != "gaussian" && e->value != "near_truth")
        fail(e->line, "init.kind must be zero, gaussian or near_truth, got '" + e->value + "'");
      config.init_kind = e->value;
    }
    if (auto e = take("init.scale")) config.init_scale = typed(*e, "init.scale", ParamType::real, true);
    if (auto e = take("output.dir")) config.output_dir = e->value;
    if (auto e = take("output.wall_clock")) config.wall_clock = boolean(*e, "output.wall_clock");
    if (auto e = take("output.save_instances")) config.save_instances = boolean(*e, "output.save_instances");

    if (!entries_.empty()) {
      const auto it = std::min_element(entries_.begin(), entries_.end(),
                                       [](const auto& a, const auto& b) { return a.second.line < b.second.line; });
      fail(it->second.line, "unknown key '" + it->first + "'");
    }
    return config;
  }

 private:
  [[noreturn]] void fail(std::size_t line, const std::string& message) const {
    throw ConfigError(source_, line, message);
  }

  std::optional<Entry> take(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    Entry e = it->second;
    entries_.erase(it);
    return e;
  }

  double typed(const Entry& e, const std::string& key, ParamType type, bool positive) const {
    if (!valid_value(type, e.value)) fail(e.line, "'" + key + "' must be " + type_name(type) + ", got '" + e.value + "'");
    const double v = *parse_double(e.value);
    if (positive && !(v > 0.0)) fail(e.line, "'" + key + "' must be positive");
    return v;
  }

  bool boolean(const Entry& e, const std::string& key) const {
    if (!valid_value(ParamType::boolean, e.value)) fail(e.line, "'" + key + "' must be true or false");
    return e.value == "true";
  }

  std::optional<Choice> choice(const std::string& section, const std::vector<ComponentSpec>& catalog,
                               bool required) {
    const auto name = take(section + ".name");
    if (!name) {
      if (!required) {
        for (const auto& [key, e] : entries_)
          if (key.starts_with(section + ".")) fail(e.line, "'" + key + "' given without " + section + ".name");
        return std::nullopt;
      }
      fail(last_line(), "missing required key '" + section + ".name'");
    }
    const auto spec = std::find_if(catalog.begin(), catalog.end(), [&](const auto& c) { return c.name == name->value; });
    if (spec == catalog.end()) fail(name->line, "unknown " + section + " '" + name->value + "'");
    lines_[section] = name->line;

    Choice choice;
    choice.name = name->value;
    for (const auto& p : spec->params) {
      const std::string key = section + "." + p.key;
      if (auto e = take(key)) {
        const bool automatic = p.default_value == "auto" && e->value == "auto";
        if (!automatic && !valid_value(p.type, e->value))
          fail(e->line, "'" + key + "' must be " + type_name(p.type) + ", got '" + e->value + "'");
        if (!automatic && p.type == ParamType::integer && *parse_int(e->value) < 0)
          fail(e->line, "'" + key + "' must be nonnegative");
        if (!automatic && p.type == ParamType::real && *parse_double(e->value) < 0.0)
          fail(e->line, "'" + key + "' must be nonnegative");
        choice.params[p.key] = e->value;
        param_lines_[key] = e->line;
      } else {
        choice.params[p.key] = p.default_value;
      }
    }
    for (const auto& [key, e] : entries_)
      if (key.starts_with(section + "."))
        fail(e.line, "unknown key '" + key + "' for " + section + " '" + choice.name + "'");
    return choice;
  }

  void check_structure(const std::string& problem, const std::string& section, const std::string& solver) const {
    const Structure need = solver_needs(solver);
    if (!problem_has(problem, need))
      fail(lines_.at(section), "solver '" + solver + "' needs " + structure_name(need) + "; '" + problem +
                                   "' does not provide one");
  }

  void check_text(const std::string& section, const Choice& c) const {
    if (auto it = c.params.find("warm_start"); it != c.params.end() && it->second != "prev" &&
                                                it->second != "extrapolated")
      fail(param_lines_.at(section + ".warm_start"), "'" + section + ".warm_start' must be prev or extrapolated");
  }

  std::vector<std::uint64_t> seeds() {
    const auto e = take("run.seeds");
    if (!e) return {0};
    std::vector<std::uint64_t> out;
    std::string_view rest = e->value;
    while (true) {
      const auto comma = rest.find(',');
      const auto item = trim(rest.substr(0, comma));
      const auto v = parse_int(item);
      if (!v || *v < 0) fail(e->line, "run.seeds must be a comma-separated list of nonnegative integers");
      out.push_back(static_cast<std::uint64_t>(*v));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    std::set<std::uint64_t> unique(out.begin(), out.end());
    if (unique.size() != out.size()) fail(e->line, "run.seeds contains duplicates");
    return out;
  }

  std::size_t last_line() const {
    std::size_t line = 1;
    for (const auto& [key, e] : entries_) line = std::max(line, e.line);
    return line;
  }

  std::string source_;
  std::map<std::string, Entry> entries_;
  std::map<std::string, std::size_t> lines_;
  std::map<std::string, std::size_t> param_lines_;
};

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  ExperimentConfig config = Parser(text, source).build();
  config.hash = fnv1a_hex(text);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

}  // namespace proxkit::bench
