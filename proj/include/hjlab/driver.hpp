#pragma once

#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hjlab/config.hpp"
#include "hjlab/errors.hpp"
#include "hjlab/estimates.hpp"
#include "hjlab/fp_adjoint.hpp"
#include "hjlab/rate_lab.hpp"
#include "hjlab/report.hpp"

namespace hjlab {

enum class Command { sweep, verify, baseline };

struct RunOptions {
  std::optional<std::string> out_dir;
  std::optional<std::vector<std::string>> formats;
  bool quiet = false;
};

/// Invariant and certificate suite on one problem at one viscosity.
struct VerifyReport {
  double epsilon = 0.0;
  std::vector<CheckResult> checks;
  std::vector<std::string> skipped;
  bool pass = false;
};

namespace detail {

inline std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << std::scientific << v;
  return os.str();
}

}  // namespace detail

inline VerifyReport verify_problem(const SweepPlan& plan, double eps) {
  const ProblemSpec& p = plan.problem;
  const Grid& g = p.grid;
  VerifyReport rep;
  rep.epsilon = eps;
  auto add = [&](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
  };

  const SpaceTimeField u = solve_viscous(p, eps, plan.dt);
  const Point x0 = plan.x0.value_or(detail::box_center(g));
  const DensityTrajectory rho = solve_adjoint(adjoint_drift(u, p.hamiltonian, plan.tau), eps, x0);

  double mass_dev = 0.0, rho_min = 0.0;
  for (double m : rho.mass_ledger) mass_dev = std::max(mass_dev, std::abs(m - 1.0));
  for (double m : rho.min_ledger) rho_min = std::min(rho_min, m);
  add("mass conservation", mass_dev <= 1e-12, "max |mass - 1| = " + detail::sci(mass_dev));
  add("positivity", rho_min >= kPositivityFloor, "min density = " + detail::sci(rho_min));

  const LipschitzCertificate lip = lipschitz_certificate(u, rho, eps);
  add("Lipschitz certificate", std::isfinite(lip.C_L),
      "C_L = " + detail::sci(lip.C_L) + " (sup |Du| = " + detail::sci(lip.sup_grad) + ")");

  double normal = -std::numeric_limits<double>::infinity();
  for (const auto& s : u.slices) {
    const VectorField du = gradient(s);
    ScalarField w(g);
    for (std::size_t c = 0; c < g.size(); ++c) w[c] = du.norm_sq(c);
    for (double v : boundary_normal_difference(w)) normal = std::max(normal, v);
  }
  add("boundary inequality d_nu |Du|^2 <= 0", normal <= 1e-6, "max = " + detail::sci(normal));

  const DualityCheck dual = duality_residual(p, eps, 0.25 * eps, x0, plan.tau, plan.dt);
  add("duality representation", dual.residual <= 0.05, "relative residual = " + detail::sci(dual.residual));

  ProblemSpec shifted = p;
  const auto base = p.terminal.value;
  shifted.terminal.value = [base](const Point& x) { return base(x) + 0.1; };
  const SpaceTimeField us = solve_viscous(shifted, eps, u.dt);
  double shift_dev = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k)
    for (std::size_t c = 0; c < g.size(); ++c)
      shift_dev = std::max(shift_dev, std::abs(us.slices[k][c] - u.slices[k][c] - 0.1));
  add("comparison under a shifted datum", shift_dev <= 1e-10, "max deviation = " + detail::sci(shift_dev));

  const auto kind = p.hamiltonian.kind();
  const bool power_like = kind == HamiltonianKind::quadratic || kind == HamiltonianKind::power;
  const bool hyp = p.flags.semi_superharmonic_terminal && p.flags.source_delta_bound && p.flags.source_normal_nonneg;
  if (power_like && hyp) {
    const DeltaPlusCertificate ly = delta_u_plus_bound(u, *p.M0(), p.source.c_f_integral(p.horizon), p);
    add("(Laplacian u)+ <= M0 + int c_f", ly.pass,
        "measured " + detail::sci(ly.measured_max) + ", bound " + detail::sci(ly.bound));
  } else {
    rep.skipped.push_back("(Laplacian u)+ bound: needs |p|^gamma and a certified semi-superharmonic datum");
  }
  if (kind == HamiltonianKind::quadratic && hyp) {
    const SecondOrderCertificate so = weighted_second_order(u, rho, plan.alpha, plan.tau, p);
    add("weighted second order <= K", so.pass, "measured " + detail::sci(so.measured) + ", K " + detail::sci(so.K));
  } else {
    rep.skipped.push_back("weighted second order: needs |p|^2 and a certified semi-superharmonic datum");
  }
  rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(), [](const CheckResult& c) { return c.pass; });
  return rep;
}

inline Json to_json(const VerifyReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return Json{{"epsilon", r.epsilon}, {"checks", checks}, {"skipped", r.skipped}, {"pass", r.pass}};
}

inline std::vector<std::string> emit_verify(const VerifyReport& r, const RunConfig& c, const std::string& dir,
                                            const std::vector<std::string>& formats) {
  detail::check_formats(formats);
  std::vector<OutputFile> files;
  for (const auto& f : formats) {
    if (f == "csv") {
      std::ostringstream os;
      os << "check,pass,detail\n";
      for (const auto& k : r.checks) os << '"' << k.name << "\"," << (k.pass ? "true" : "false") << ",\"" << k.detail << "\"\n";
      files.push_back({c.name + "_verify.csv", os.str()});
    }
    if (f == "json") {
      Json doc{{"schema_version", kReportSchemaVersion},
               {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
               {"config", config_echo(c)},
               {"verify", to_json(r)}};
      files.push_back({c.name + "_verify.json", doc.dump(2) + "\n"});
    }
  }
  return write_files(dir, files);
}

namespace detail {

inline void print_sweep(std::ostream& out, const RateReport& r) {
  out << "experiment " << to_string(r.kind) << ", " << r.rows.size() << " viscosities, sweep grid " << r.sweep_cells
      << ", reference grid " << r.reference_cells << "\n";
  out << std::setw(12) << "epsilon" << std::setw(14) << "sup_error" << std::setw(14) << "pos_error" << std::setw(14)
      << "neg_error" << std::setw(14) << "bound_upper" << std::setw(14) << "bound_lower" << "  pass\n";
  for (const auto& w : r.rows)
    out << std::setw(12) << sci(w.epsilon) << std::setw(14) << sci(w.sup_error) << std::setw(14) << sci(w.pos_error)
        << std::setw(14) << sci(w.neg_error) << std::setw(14) << sci(w.bound_upper) << std::setw(14)
        << sci(w.bound_lower) << "  " << (w.pass ? "yes" : "no") << "\n";
  if (r.fit.degenerate) out << "fit: degenerate\n";
  else out << "fit: exponent " << r.fit.exponent << ", constant " << r.fit.constant << "\n";
  out << "scheme error " << sci(r.scheme_error) << " (sweep grid " << sci(r.sweep_scheme_error) << ")\n";
  for (const auto& c : r.checks) out << (c.pass ? "  ok    " : "  FAIL  ") << c.name << ": " << c.detail << "\n";
}

}  // namespace detail

/// Executes one command. Exit codes: 0 all checks pass, 2 inconclusive resolution, 1 anything else.
inline int run(RunConfig c, Command cmd, const RunOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    if (opt.out_dir) c.out_dir = *opt.out_dir;
    if (opt.formats) c.formats = *opt.formats;
    if (cmd == Command::baseline) {
      c.experiment = ExperimentKind::heat_baseline;
      c.hamiltonian = "zero";
      c.source = "zero";
      c.source_params.clear();
    }
    validate(c);
    std::error_code ec;
    if (!std::filesystem::is_directory(c.out_dir, ec))
      throw IoError("output directory '" + c.out_dir + "' does not exist");
    const SweepPlan plan = make_plan(c);

    if (cmd == Command::verify) {
      const VerifyReport v = verify_problem(plan, plan.epsilons.front());
      emit_verify(v, c, c.out_dir, c.formats);
      if (!opt.quiet) {
        for (const auto& k : v.checks) out << (k.pass ? "  ok    " : "  FAIL  ") << k.name << ": " << k.detail << "\n";
        for (const auto& s : v.skipped) out << "  skip  " << s << "\n";
      }
      return v.pass ? 0 : 1;
    }

    const RateReport r = run_sweep(plan);
    emit_report(r, c, c.out_dir, c.formats);
    if (!opt.quiet) detail::print_sweep(out, r);
    if (r.inconclusive) {
      err << "inconclusive: scheme error " << detail::sci(r.scheme_error)
          << " exceeds 10% of the smallest measured gap\n";
      return 2;
    }
    return r.pass ? 0 : 1;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const ValidationError& e) {
    err << "invalid config: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 1;
}

inline int run_file(const std::string& path, Command cmd, const RunOptions& opt, std::ostream& out,
                    std::ostream& err) {
  try {
    return run(parse_config(path), cmd, opt, out, err);
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const ValidationError& e) {
    err << "invalid config: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 1;
}

}  // namespace hjlab
