#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hjlab/catalog.hpp"
#include "hjlab/errors.hpp"
#include "hjlab/grid.hpp"
#include "hjlab/hamiltonian.hpp"
#include "hjlab/hj_solver.hpp"
#include "hjlab/rate_lab.hpp"

namespace hjlab {

/// Everything an experiment needs, validated against the catalog before any solve.
struct RunConfig {
  // [domain]
  int dim = 1;
  std::vector<Interval> box{Interval{0.0, 1.0}};
  // [grid]
  std::vector<int> cells;
  std::string dt_policy = "auto";
  double dt = 0.0;
  int refinement = 8;
  int snapshots = 65;
  // [problem]
  double horizon = 1.0;
  std::string hamiltonian = "quadratic";
  double gamma = 2.0;
  std::optional<double> delta;
  std::vector<double> nodes;
  std::vector<double> values;
  std::string terminal;
  Params terminal_params;
  std::string source = "zero";
  Params source_params;
  // [sweep]
  ExperimentKind experiment = ExperimentKind::two_sided;
  std::vector<double> epsilons;
  double beta = 0.75;
  double alpha = 1.5;
  double tau = 0.0;
  std::optional<Point> x0;
  double collar = 0.0;
  bool doubling_check = false;
  unsigned threads = 0;
  // [output]
  std::string out_dir = ".";
  std::vector<std::string> formats{"csv", "json"};
  std::string name = "report";
};

inline std::vector<std::string> hamiltonian_names() { return {"quadratic", "power", "zero", "tabulated"}; }

/// Default smoothing for power Hamiltonians with γ < 2.
inline constexpr double kDefaultPowerDelta = 1e-8;

inline HamiltonianSpec make_hamiltonian(const RunConfig& c) {
  if (c.hamiltonian == "quadratic") return HamiltonianSpec::quadratic();
  if (c.hamiltonian == "zero") return HamiltonianSpec::zero();
  if (c.hamiltonian == "power")
    return HamiltonianSpec::power(c.gamma, c.delta.value_or(c.gamma < 2.0 ? kDefaultPowerDelta : 0.0));
  if (c.hamiltonian == "tabulated") return HamiltonianSpec::tabulated(c.nodes, c.values);
  throw ValidationError("problem.hamiltonian: unknown Hamiltonian '" + c.hamiltonian +
                        "'; available: " + Catalog::join(hamiltonian_names()));
}

inline Grid make_grid(const RunConfig& c) { return build_grid(c.box, c.cells); }

inline SweepPlan make_plan(const RunConfig& c) {
  SweepPlan plan;
  plan.problem = make_problem(make_grid(c), c.horizon, make_hamiltonian(c),
                              Catalog::terminal(c.terminal, c.dim, c.terminal_params),
                              Catalog::source(c.source, c.dim, c.source_params));
  plan.epsilons = c.epsilons;
  plan.refinement = c.refinement;
  plan.dt = c.dt;
  plan.kind = c.experiment;
  plan.beta = c.beta;
  plan.alpha = c.alpha;
  plan.x0 = c.x0;
  plan.tau = c.tau;
  plan.snapshots = c.snapshots;
  plan.collar = c.collar;
  plan.doubling_check = c.doubling_check;
  plan.threads = c.threads;
  return plan;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Reader {
 public:
  Reader(std::string section, std::string key, std::string value, int line)
      : key_(section + "." + key), value_(std::move(value)), line_(line) {}

  double number() const { return to_double(value_); }
  int integer() const {
    int v = 0;
    const auto* end = value_.data() + value_.size();
    const auto r = std::from_chars(value_.data(), end, v);
    if (r.ec != std::errc() || r.ptr != end) fail("expected an integer, got '" + value_ + "'");
    return v;
  }
  bool boolean() const {
    if (value_ == "true" || value_ == "yes" || value_ == "1") return true;
    if (value_ == "false" || value_ == "no" || value_ == "0") return false;
    fail("expected true or false, got '" + value_ + "'");
    return false;
  }
  std::vector<double> numbers() const {
    std::vector<double> out;
    for (const auto& s : split_list(value_)) out.push_back(to_double(s));
    if (out.empty()) fail("expected a comma-separated list of numbers");
    return out;
  }
  std::string text() const { return value_; }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, key_ + ": " + what); }

 private:
  double to_double(const std::string& s) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail("expected a number, got '" + s + "'");
    }
  }

  std::string key_;
  std::string value_;
  int line_;
};

inline void apply(RunConfig& c, const std::string& section, const std::string& key, const Reader& r) {
  auto interval = [&] {
    const auto v = r.numbers();
    if (v.size() != 2) r.fail("expected 'lo, hi'");
    return Interval{v[0], v[1]};
  };
  if (section == "domain") {
    if (key == "dim") return void(c.dim = r.integer());
    if (key == "x") return void(c.box.at(0) = interval());
    if (key == "y") {
      if (c.box.size() < 2) c.box.resize(2);
      return void(c.box[1] = interval());
    }
  } else if (section == "grid") {
    if (key == "cells") {
      c.cells.clear();
      for (double v : r.numbers()) {
        if (v != std::floor(v)) r.fail("cell counts must be integers");
        c.cells.push_back(static_cast<int>(v));
      }
      return;
    }
    if (key == "dt") {
      c.dt_policy = r.text();
      c.dt = c.dt_policy == "auto" ? 0.0 : r.number();
      if (c.dt_policy != "auto" && !(c.dt > 0.0)) r.fail("dt must be 'auto' or a positive number");
      return;
    }
    if (key == "refinement") return void(c.refinement = r.integer());
    if (key == "snapshots") return void(c.snapshots = r.integer());
  } else if (section == "problem") {
    if (key == "horizon") return void(c.horizon = r.number());
    if (key == "hamiltonian") return void(c.hamiltonian = r.text());
    if (key == "gamma") return void(c.gamma = r.number());
    if (key == "delta") return void(c.delta = r.number());
    if (key == "nodes") return void(c.nodes = r.numbers());
    if (key == "values") return void(c.values = r.numbers());
    if (key == "terminal") return void(c.terminal = r.text());
    if (key == "source") return void(c.source = r.text());
    if (key.starts_with("terminal.")) return void(c.terminal_params[key.substr(9)] = r.number());
    if (key.starts_with("source.")) return void(c.source_params[key.substr(7)] = r.number());
  } else if (section == "sweep") {
    if (key == "experiment") {
      try {
        c.experiment = parse_experiment_kind(r.text());
      } catch (const ValidationError& e) {
        r.fail(e.what());
      }
      return;
    }
    if (key == "epsilons") return void(c.epsilons = r.numbers());
    if (key == "beta") return void(c.beta = r.number());
    if (key == "alpha") return void(c.alpha = r.number());
    if (key == "tau") return void(c.tau = r.number());
    if (key == "x0") {
      const auto v = r.numbers();
      if (v.size() > 2) r.fail("expected one or two coordinates");
      c.x0 = Point{v[0], v.size() > 1 ? v[1] : 0.0};
      return;
    }
    if (key == "collar") return void(c.collar = r.number());
    if (key == "doubling_check") return void(c.doubling_check = r.boolean());
    if (key == "threads") {
      const int t = r.integer();
      if (t < 0) r.fail("threads must be >= 0");
      return void(c.threads = static_cast<unsigned>(t));
    }
  } else if (section == "output") {
    if (key == "dir") return void(c.out_dir = r.text());
    if (key == "name") return void(c.name = r.text());
    if (key == "formats") return void(c.formats = split_list(r.text()));
  }
  r.fail("unknown key");
}

inline void check_formats(const std::vector<std::string>& formats) {
  for (const auto& f : formats)
    if (f != "csv" && f != "json") throw ValidationError("output.formats: unknown format '" + f + "'; available: csv, json");
}

}  // namespace detail

/// Cross-field and catalog validation; errors name the offending key.
inline void validate(const RunConfig& c) {
  if (c.dim != 1 && c.dim != 2) throw ValidationError("domain.dim: must be 1 or 2");
  if (static_cast<int>(c.box.size()) != c.dim) throw ValidationError("domain: need one interval per axis");
  if (c.cells.empty()) throw ValidationError("grid.cells: required");
  if (c.terminal.empty()) throw ValidationError("problem.terminal: required");
  if (!(c.horizon > 0.0)) throw ValidationError("problem.horizon: must be positive");
  const auto names = hamiltonian_names();
  if (std::find(names.begin(), names.end(), c.hamiltonian) == names.end())
    throw ValidationError("problem.hamiltonian: unknown Hamiltonian '" + c.hamiltonian +
                          "'; available: " + Catalog::join(names));
  detail::check_formats(c.formats);
  if (c.name.empty() || c.name.find('/') != std::string::npos)
    throw ValidationError("output.name: must be a plain file stem");
  if (static_cast<int>(c.cells.size()) != c.dim) throw ValidationError("grid.cells: need one count per axis");
  try {
    validate(make_plan(c));
  } catch (const CatalogError& e) {
    throw ValidationError(std::string("problem: ") + e.what());
  } catch (const HypothesisError& e) {
    throw ValidationError(std::string("sweep.experiment: ") + e.what());
  } catch (const InvalidDomainError& e) {
    throw ValidationError(std::string("domain: ") + e.what());
  } catch (const ResolutionError& e) {
    throw ValidationError(std::string("grid.cells: ") + e.what());
  } catch (const InputError& e) {
    throw ValidationError(std::string("problem: ") + e.what());
  }
}

/// Parses INI-like text with sections [domain], [grid], [problem], [sweep], [output].
/// '#' and ';' start comments. Unknown sections or keys are parse errors.
inline RunConfig parse_config_text(const std::string& text) {
  static const std::set<std::string> sections{"domain", "grid", "problem", "sweep", "output"};
  RunConfig c;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find_first_of("#;");
    const std::string s = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError(line, "unterminated section header");
      section = detail::trim(s.substr(1, s.size() - 2));
      if (!sections.count(section)) throw ParseError(line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected 'key = value'");
    if (section.empty()) throw ParseError(line, "key outside of any section");
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::trim(s.substr(eq + 1));
    if (key.empty()) throw ParseError(line, "empty key");
    if (value.empty()) throw ParseError(line, section + "." + key + ": empty value");
    if (!seen.insert(section + "." + key).second) throw ParseError(line, section + "." + key + ": duplicate key");
    detail::apply(c, section, key, detail::Reader(section, key, value, line));
  }
  c.box.resize(static_cast<std::size_t>(std::clamp(c.dim, 1, 2)), Interval{0.0, 1.0});
  if (c.dim == 2 && c.cells.size() == 1) c.cells.push_back(c.cells[0]);
  validate(c);
  return c;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace hjlab
