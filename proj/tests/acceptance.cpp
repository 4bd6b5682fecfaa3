// Acceptance run: one PASS/FAIL line per criterion, exit 0 only when every line passes.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "drifts.hpp"
#include "hjlab/hjlab.hpp"

using namespace hjlab;
namespace {

constexpr double pi = std::numbers::pi;

struct Verdict {
  bool pass = true;
  std::string detail;
};

Grid line(int n) { return build_grid({Interval{0.0, 1.0}}, {n}); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

SweepPlan plan_for(ProblemSpec p, std::vector<double> eps, ExperimentKind kind) {
  SweepPlan s;
  s.problem = std::move(p);
  s.epsilons = std::move(eps);
  s.kind = kind;
  return s;
}

ProblemSpec certified(int n, HamiltonianSpec h) {
  return make_problem(line(n), 0.5, std::move(h), "cosine", "cos_source", {{"amplitude", 0.2}}, {{"amplitude", 1.0}});
}

Verdict mass_and_positivity(bool mass) {
  Verdict v;
  double worst = 0.0, lo = 0.0;
  for (const auto& d : fixtures::drift_suite(512)) {
    const DensityTrajectory r = solve_adjoint(d.drift, d.eps, {0.37, 0.0});
    for (double m : r.mass_ledger) worst = std::max(worst, std::abs(m - 1.0));
    for (double m : r.min_ledger) lo = std::min(lo, m);
  }
  if (mass) {
    v.pass = worst <= 1e-12;
    v.detail = fmt("10 drifts, max |mass - 1| = %.2e", worst);
  } else {
    v.pass = lo >= kPositivityFloor;
    v.detail = fmt("10 drifts, min density = %.2e", lo);
  }
  return v;
}

Verdict heat_baseline_rate() {
  const ProblemSpec p = make_problem(line(1024), 1.0, HamiltonianSpec::zero(), "kink", "zero");
  const RateReport r =
      run_sweep(plan_for(p, {1e-2, 3.1622776601683794e-3, 1e-3, 3.1622776601683794e-4, 1e-4}, ExperimentKind::heat_baseline));
  Verdict v;
  v.pass = !r.fit.degenerate && r.fit.exponent >= 0.45 && r.fit.exponent <= 0.60;
  for (const auto& w : r.rows) v.pass = v.pass && w.sup_error <= w.bound_upper * 1.05;
  v.detail = fmt("exponent %.3f, C = %.3f", r.fit.exponent, r.heat_constant);
  return v;
}

Verdict two_sided_bound() {
  const ProblemSpec p = make_problem(line(2048), 0.25, HamiltonianSpec::quadratic(), "kink", "zero");
  const RateReport r = run_sweep(plan_for(p, {0.16, 0.08, 0.04, 0.02, 0.01}, ExperimentKind::two_sided));
  Verdict v;
  double ratio = 0.0;
  for (const auto& w : r.rows) {
    const double bound = 2.0 * std::sqrt(w.C_L) * std::sqrt(w.epsilon * 0.25);
    ratio = std::max(ratio, w.sup_error / bound);
  }
  v.pass = !r.inconclusive && ratio <= 1.05 && r.C_L_variation <= 0.10;
  v.detail = fmt("max error/bound %.3f, C_L variation %.3f", ratio, r.C_L_variation);
  return v;
}


const RateReport& one_sided_report() {
  static const RateReport r = run_sweep(
      plan_for(certified(1024, HamiltonianSpec::quadratic()), {0.16, 0.08, 0.04, 0.02, 0.01, 0.005}, ExperimentKind::one_sided));
  return r;
}

Verdict one_sided_upper() {
  const RateReport& r = one_sided_report();
  Verdict v;
  double ratio = 0.0;
  for (const auto& w : r.rows) ratio = std::max(ratio, w.pos_error / (w.epsilon * 0.5 * (r.M0 + r.c_f_integral)));
  v.pass = !r.inconclusive && ratio <= 1.05 && !r.fit_pos.degenerate && r.fit_pos.exponent >= 0.9;
  v.detail = fmt("max pos/bound %.3f, pos exponent %.3f", ratio, r.fit_pos.exponent);
  return v;
}

Verdict one_sided_lower() {
  const RateReport& r = one_sided_report();
  Verdict v;
  double ratio = 0.0;
  for (const auto& w : r.rows)
    ratio = std::max(ratio, w.neg_error / lower_bound_constant(0.75, 1, r.K, w.C_L, w.epsilon));
  v.pass = !r.inconclusive && ratio <= 1.05 && !r.fit_neg.degenerate && r.fit_neg.exponent >= 0.5;
  v.detail = fmt("max neg/bound %.3f, neg exponent %.3f, K = %.3f", ratio, r.fit_neg.exponent, r.K);
  return v;
}

Verdict weighted_second_order_bound() {
  const ProblemSpec p = certified(512, HamiltonianSpec::quadratic());
  Verdict v;
  double worst = 0.0, K = 0.0;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const SpaceTimeField u = solve_viscous(p, eps);
    const DensityTrajectory rho = solve_adjoint(adjoint_drift(u, p.hamiltonian, 0.0), eps, {0.5, 0.0});
    const SecondOrderCertificate c = weighted_second_order(u, rho, 1.5, 0.0, p);
    worst = std::max(worst, c.measured);
    K = c.K;
    v.pass = v.pass && c.measured <= c.K * 1.05;
  }
  v.detail = fmt("max measured %.3f, K = %.3f", worst, K);
  return v;
}

Verdict li_yau() {
  Verdict v;
  double worst = 0.0, bound = 0.0;
  for (double gamma : {1.5, 2.0, 3.0}) {
    const ProblemSpec p = certified(512, HamiltonianSpec::power(gamma, gamma < 2.0 ? kDefaultPowerDelta : 0.0));
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      const DeltaPlusCertificate c = delta_u_plus_bound(solve_viscous(p, eps), *p.M0(), p.source.c_f_integral(0.5), p);
      worst = std::max(worst, c.measured_max);
      bound = c.bound;
      v.pass = v.pass && c.measured_max <= c.bound * 1.05;
    }
  }
  v.detail = fmt("max (Laplacian u)+ %.3f, bound %.3f", worst, bound);
  return v;
}

Verdict duality() {
  Verdict v;
  std::string detail;
  const std::vector<std::pair<std::string, std::function<ProblemSpec(int)>>> problems{
      {"heat cosine", [](int n) { return make_problem(line(n), 0.5, HamiltonianSpec::zero(), "cosine", "zero", {{"amplitude", 0.5}}); }},
      {"quadratic cosine",
       [](int n) { return make_problem(line(n), 0.5, HamiltonianSpec::quadratic(), "cosine", "zero", {{"amplitude", 0.5}}); }}};
  for (const auto& [name, make] : problems) {
    const double dt = auto_time_step(make(128));
    const double coarse = duality_residual(make(128), 0.02, 0.005, {0.3, 0}, 0.0, dt).residual;
    const double fine = duality_residual(make(256), 0.02, 0.0025, {0.3, 0}, 0.0, 0.5 * dt).residual;
    v.pass = v.pass && fine <= 0.05 && coarse / fine >= 1.5;
    detail += (detail.empty() ? "" : "; ") + name + fmt(" %.2e at N=256, reduction %.2f", fine, coarse / fine);
  }
  v.detail = detail;
  return v;
}

// f = −∂_t u* − εΔu* + |Du*|² for u* = cos(πx)(1 + T − t).
SourceTerm manufactured_source(double eps, double T) {
  SourceTerm s;
  s.name = "manufactured";
  s.dim = 1;
  s.modes.push_back({[=](double t) { return 1.0 + eps * pi * pi * (1.0 + T - t); },
                     [](const Point& x) { return std::cos(pi * x[0]); }});
  s.modes.push_back({[=](double t) { return pi * pi * (1.0 + T - t) * (1.0 + T - t); },
                     [](const Point& x) { return std::sin(pi * x[0]) * std::sin(pi * x[0]); }});
  return s;
}

Verdict properties() {
  std::vector<std::string> failed;
  auto need = [&](bool ok, const std::string& name) {
    if (!ok) failed.push_back(name);
  };
  const auto H = HamiltonianSpec::quadratic();

  {
    const Grid g = line(64);
    const ProblemSpec lo = make_problem(g, 0.5, H, "cosine", "constant", {{"amplitude", 0.3}}, {{"value", 0.0}});
    const ProblemSpec hi = make_problem(g, 0.5, H, "cosine", "constant", {{"amplitude", 0.3}}, {{"value", 0.5}});
    const double dt = 0.5 * auto_time_step(hi);
    const SpaceTimeField a = solve_viscous(lo, 0.01, dt), b = solve_viscous(hi, 0.01, dt);
    bool ok = true;
    for (std::size_t k = 0; k < a.size(); ++k)
      for (std::size_t c = 0; c < g.size(); ++c) ok = ok && a.slices[k][c] <= b.slices[k][c] + 1e-10;
    need(ok, "comparison");
  }
  {
    const ProblemSpec p = make_problem(line(32), 1.0, H, "constant", "zero");
    double dev = 0.0;
    for (const auto& s : solve_viscous(p, 0.01).slices)
      for (double x : s.values) dev = std::max(dev, std::abs(x - 5.0));
    need(dev <= 1e-10, "constant preservation");
  }
  {
    const ProblemSpec p = make_problem(line(50), 0.5, HamiltonianSpec::power(3.0, 0.0), "kink", "zero");
    double dev = 0.0;
    for (const auto& s : solve_viscous(p, 0.02).slices)
      for (int i = 0; i < 25; ++i) dev = std::max(dev, std::abs(s[i] - s[49 - i]));
    need(dev <= 1e-12, "symmetry");
  }
  {
    std::vector<double> r;
    for (int n : {32, 64, 128}) {
      const Grid g = line(n);
      ScalarField u(g);
      for (std::size_t c = 0; c < g.size(); ++c) u[c] = std::cos(pi * g.center_of(c)[0]);
      r.push_back(bochner_residual(u));
    }
    need(std::log2(r[0] / r[1]) >= 1.8 && std::log2(r[1] / r[2]) >= 1.8, "Bochner residual order");
  }
  {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const Grid g = line(16);
    double worst = 0.0;
    for (int step = 0; step < 5; ++step) {
      VectorField b(g);
      for (double& x : b.components[0]) x = U(rng);
      const AdjointStep A(b, 0.03, 0.2 * g.min_spacing());
      std::vector<double> rho(g.size()), phi(g.size());
      for (auto& x : rho) x = 1.0 + U(rng);
      for (auto& x : phi) x = U(rng);
      std::vector<double> Arho = rho, Atphi = phi;
      A.forward(Arho);
      A.transpose_apply(Atphi);
      double lhs = 0.0, rhs = 0.0;
      for (std::size_t c = 0; c < g.size(); ++c) lhs += Arho[c] * phi[c], rhs += rho[c] * Atphi[c];
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    need(worst <= 1e-12, "discrete adjointness");
  }
  {
    double worst = -1.0;
    for (const char* name : {"kink", "cosine", "tent", "half_square"})
      for (const auto& s : solve_viscous(make_problem(line(256), 0.5, H, name, "zero"), 0.01, 0.0, 17).slices) {
        const VectorField du = gradient(s);
        ScalarField w(s.grid);
        for (std::size_t c = 0; c < w.size(); ++c) w[c] = du.norm_sq(c);
        for (double x : boundary_normal_difference(w)) worst = std::max(worst, x);
      }
    need(worst <= 1e-6, "boundary inequality");
  }
  {
    const double T = 0.5, eps = 0.1;
    std::vector<double> err;
    for (int n : {32, 64, 128}) {
      const Grid g = line(n);
      const SpaceTimeField u = solve_viscous(make_problem(g, T, H, Catalog::terminal("cosine", 1), manufactured_source(eps, T)), eps);
      double e = 0.0;
      for (std::size_t k = 0; k < u.size(); ++k)
        for (std::size_t c = 0; c < g.size(); ++c)
          e = std::max(e, std::abs(u.slices[k][c] - std::cos(pi * g.center_of(c)[0]) * (1.0 + T - u.times[k])));
      err.push_back(e);
    }
    need(std::log2(err[0] / err[1]) >= 0.9 && std::log2(err[1] / err[2]) >= 0.9, "manufactured order");
  }
  Verdict v;
  v.pass = failed.empty();
  v.detail = "7 suites";
  for (const auto& f : failed) v.detail += ", failed: " + f;
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"mass conservation of the adjoint density", [] { return mass_and_positivity(true); }},
      {"positivity of the adjoint density", [] { return mass_and_positivity(false); }},
      {"heat baseline sqrt(eps) rate", heat_baseline_rate},
      {"two-sided bound 2 sqrt(n C_L) sqrt(eps T)", two_sided_bound},
      {"one-sided upper bound eps (M0 + int c_f)", one_sided_upper},
      {"one-sided lower bound constant", one_sided_lower},
      {"weighted second-order integral <= K", weighted_second_order_bound},
      {"(Laplacian u_eps)+ <= M0 + int c_f for gamma 1.5, 2, 3", li_yau},
      {"duality representation residual", duality},
      {"property suites", properties},
  };
  int failures = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2zu %s  %s: %s (%.1f s)\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                v.detail.c_str(), secs);
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of %zu criteria pass, %.1f s\n", static_cast<int>(criteria.size()) - failures, criteria.size(), total);
  return failures == 0 ? 0 : 1;
}
