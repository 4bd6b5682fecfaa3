#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hjlab/errors.hpp"
#include "hjlab/estimates.hpp"
#include "hjlab/fp_adjoint.hpp"
#include "hjlab/grid.hpp"
#include "hjlab/hj_solver.hpp"

namespace hjlab {

enum class ExperimentKind { two_sided, one_sided, heat_baseline };

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::two_sided: return "two_sided";
    case ExperimentKind::one_sided: return "one_sided";
    case ExperimentKind::heat_baseline: return "heat_baseline";
  }
  return "two_sided";
}

inline ExperimentKind parse_experiment_kind(const std::string& s) {
  if (s == "two_sided") return ExperimentKind::two_sided;
  if (s == "one_sided") return ExperimentKind::one_sided;
  if (s == "heat_baseline") return ExperimentKind::heat_baseline;
  throw ValidationError("unknown experiment '" + s + "'; available: two_sided, one_sided, heat_baseline");
}

inline constexpr double kErrorFloor = 1e-12;
inline constexpr double kResolutionRatio = 0.10;  // scheme error / smallest ε-gap
inline constexpr double kFitExclusion = 3.0;       // drop ε whose error is within 3× of the scheme error
inline constexpr double kUniformityTolerance = 0.10;
inline constexpr double kDoublingTolerance = 0.05;

struct SweepPlan {
  ProblemSpec problem;           // carries the sweep grid
  std::vector<double> epsilons;  // strictly decreasing
  int refinement = 8;            // reference grid = sweep grid × refinement per axis
  double dt = 0.0;               // ≤ 0 selects the automatic step on each grid
  ExperimentKind kind = ExperimentKind::two_sided;
  double beta = 0.75;
  double alpha = 1.5;
  std::optional<Point> x0;  // adjoint start for certificates; box center when empty
  double tau = 0.0;
  int snapshots = 65;
  double collar = 0.0;  // boundary-influence collar width; ≤ 0 means a tenth of the shortest side
  bool doubling_check = false;
  unsigned threads = 0;  // 0: HJLAB_THREADS or the hardware count
};

struct RateFit {
  double exponent = std::numeric_limits<double>::quiet_NaN();
  double constant = std::numeric_limits<double>::quiet_NaN();
  std::size_t points = 0;
  bool degenerate = true;
};

/// One ε of a sweep. Errors are sups over the stored slices (space-time) and at t = 0.
struct EpsilonRow {
  double epsilon = 0.0;
  double sup_error = 0.0;
  double pos_error = 0.0;
  double neg_error = 0.0;
  double sup_error_t0 = 0.0;
  double pos_error_t0 = 0.0;
  double neg_error_t0 = 0.0;
  double C_L = 0.0;
  double second_order = 0.0;
  double delta_plus = 0.0;
  double bound_upper = 0.0;
  double bound_lower = 0.0;
  bool pass = false;

  bool operator==(const EpsilonRow&) const = default;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;

  bool operator==(const CheckResult&) const = default;
};

struct RateReport {
  ExperimentKind kind = ExperimentKind::two_sided;
  int dim = 1;
  double horizon = 1.0;
  int sweep_cells = 0;
  int reference_cells = 0;
  std::vector<EpsilonRow> rows;
  RateFit fit;
  RateFit fit_pos;
  RateFit fit_neg;
  double C_L = 0.0;
  double C_L_variation = 0.0;
  double M = 0.0;
  double K = 0.0;
  double M0 = 0.0;
  double c_f_integral = 0.0;
  double beta = 0.75;
  double alpha = 1.5;
  double heat_constant = 0.0;
  double scheme_error = 0.0;        // reference error, Richardson estimate
  double sweep_scheme_error = 0.0;  // sweep-grid inviscid vs reference
  double boundary_influence = 0.0;
  std::vector<std::pair<double, double>> beta_curve;  // (β, max_ε neg / lower bound)
  double doubled_exponent = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = false;
  bool inconclusive = false;
  bool pass = false;
  std::vector<CheckResult> checks;
};

/// Least squares on (log ε, log error); pairs with error ≤ 1e−12 are ignored.
inline RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [e, err] : pairs)
    if (e > 0.0 && err > kErrorFloor && std::isfinite(err)) pts.emplace_back(std::log(e), std::log(err));
  if (pts.size() < 3)
    throw DegenerateFitError("need at least 3 pairs with error above 1e-12, got " + std::to_string(pts.size()));
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) mx += x, my += y;
  mx /= pts.size();
  my /= pts.size();
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) sxx += (x - mx) * (x - mx), sxy += (x - mx) * (y - my);
  if (!(sxx > 0.0)) throw DegenerateFitError("all epsilons coincide");
  RateFit f;
  f.exponent = sxy / sxx;
  f.constant = std::exp(my - f.exponent * mx);
  f.points = pts.size();
  f.degenerate = false;
  return f;
}

/// Fine-to-coarse restriction for nested cell-centered grids: the coarse
/// center is the midpoint of the central fine cells of its block, so the
/// value is their average (one cell per axis when the factor is odd).
inline ScalarField restrict_to(const ScalarField& fine, const Grid& coarse) {
  const Grid& gf = fine.grid;
  if (gf.dim() != coarse.dim()) throw CompatibilityError("restrict_to: dimensions differ");
  std::array<int, 2> r{1, 1};
  for (int a = 0; a < gf.dim(); ++a) {
    if (!(gf.extent(a) == coarse.extent(a)) || gf.cells(a) % coarse.cells(a) != 0)
      throw CompatibilityError("restrict_to: grids are not nested");
    r[a] = gf.cells(a) / coarse.cells(a);
  }
  auto taps = [](int i, int f) {
    return f % 2 == 1 ? std::vector<int>{i * f + f / 2} : std::vector<int>{i * f + f / 2 - 1, i * f + f / 2};
  };
  ScalarField out(coarse, std::vector<double>(coarse.size(), 0.0), fine.time);
  for (std::size_t c = 0; c < coarse.size(); ++c) {
    const auto ix = taps(coarse.coord(c, 0), r[0]);
    const auto jy = coarse.dim() == 2 ? taps(coarse.coord(c, 1), r[1]) : std::vector<int>{0};
    double s = 0.0;
    for (int i : ix)
      for (int j : jy) s += fine[gf.index(i, j)];
    out[c] = s / static_cast<double>(ix.size() * jy.size());
  }
  return out;
}

/// Growth of the oscillation of u inside the boundary collar, relative to the first stored slice.
inline double boundary_influence(const SpaceTimeField& u, double collar_width) {
  const Grid& g = u.grid;
  for (int a = 0; a < g.dim(); ++a)
    if (!(collar_width < 0.5 * (g.upper(a) - g.lower(a))))
      throw InputError("collar width must be below half the box width");
  std::vector<std::size_t> cells;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const Point x = g.center_of(c);
    for (int a = 0; a < g.dim(); ++a)
      if (x[a] - g.lower(a) < collar_width || g.upper(a) - x[a] < collar_width) {
        cells.push_back(c);
        break;
      }
  }
  if (cells.empty() || u.slices.empty()) return 0.0;
  auto oscillation = [&](const ScalarField& s) {
    double lo = s[cells.front()], hi = lo;
    for (std::size_t c : cells) lo = std::min(lo, s[c]), hi = std::max(hi, s[c]);
    return hi - lo;
  };
  const double first = oscillation(u.slices.front());
  double worst = first;
  for (const auto& s : u.slices) worst = std::max(worst, oscillation(s));
  return worst - first;
}

/// Worker threads for a sweep: requested (0 = hardware), capped by HJLAB_THREADS and the job count.
inline unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  if (const char* env = std::getenv("HJLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) n = std::min(n, static_cast<unsigned>(v));
  }
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

/// Runs job(i) for i < count on up to `workers` threads; the first failure (by index) is rethrown.
inline void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& job) {
  std::vector<std::exception_ptr> failures(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
}

/// Plan invariants; messages name the config key they come from.
inline void validate(const SweepPlan& plan) {
  const auto& e = plan.epsilons;
  if (e.size() < 3) throw ValidationError("sweep.epsilons: need at least 3 values");
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!(e[i] > 0.0) || !std::isfinite(e[i])) throw ValidationError("sweep.epsilons: epsilons must be positive");
    if (i > 0 && !(e[i] < e[i - 1])) throw ValidationError("sweep.epsilons: epsilons must be strictly decreasing");
  }
  if (plan.refinement < 8) throw ValidationError("grid.refinement: the reference grid must be at least 8x finer");
  if (plan.snapshots < 2) throw ValidationError("grid.snapshots: must be at least 2");
  if (!(plan.beta > 0.5 && plan.beta < 1.0)) throw ValidationError("sweep.beta: must lie in (1/2, 1)");
  if (!(plan.alpha > 1.0 && plan.alpha < 2.0)) throw ValidationError("sweep.alpha: must lie in (1, 2)");
  if (!(plan.tau >= 0.0 && plan.tau < plan.problem.horizon)) throw ValidationError("sweep.tau: must lie in [0, T)");
  const Grid& g = plan.problem.grid;
  if (plan.x0)
    for (int a = 0; a < g.dim(); ++a)
      if (!((*plan.x0)[a] >= g.lower(a) && (*plan.x0)[a] <= g.upper(a)))
        throw ValidationError("sweep.x0: outside the box");
  if (plan.kind == ExperimentKind::heat_baseline) {
    if (!plan.problem.hamiltonian.is_zero())
      throw ValidationError("problem.hamiltonian: heat_baseline needs the zero Hamiltonian");
    if (!plan.problem.source.modes.empty()) throw ValidationError("problem.source: heat_baseline needs the zero source");
  }
  if (plan.kind == ExperimentKind::one_sided) {
    if (plan.problem.hamiltonian.kind() != HamiltonianKind::quadratic)
      throw HypothesisError("one_sided rates need H(p) = |p|^2");
    require_second_order_hypotheses(plan.problem);
  }
}

namespace detail {

inline Point box_center(const Grid& g) {
  Point c{0.5 * (g.lower(0) + g.upper(0)), 0.0};
  if (g.dim() == 2) c[1] = 0.5 * (g.lower(1) + g.upper(1));
  return c;
}

/// Solve with step count a multiple of (K − 1); returns the K uniformly spaced slices,
/// and the whole trajectory through `full` when requested.
inline SpaceTimeField snapshot_solve(const ProblemSpec& p, double eps, double dt, int K,
                                     SpaceTimeField* full = nullptr) {
  const HjMarcher m(p, eps, dt, K - 1);
  if (!full) return march(m, K);
  *full = march(m, 0);
  SpaceTimeField out;
  out.grid = full->grid;
  out.dt = full->dt;
  const std::size_t every = static_cast<std::size_t>(m.steps() / (K - 1));
  for (std::size_t k = 0; k < full->size(); k += every) {
    out.times.push_back(full->times[k]);
    out.slices.push_back(full->slices[k]);
  }
  return out;
}

struct Gaps {
  double sup = 0.0, pos = 0.0, neg = 0.0;
};

inline Gaps gaps(const ScalarField& a, const ScalarField& b) {
  const OneSided s = one_sided_sup(a, b);
  return {std::max(s.pos, s.neg), s.pos, s.neg};
}

struct SweepData {
  std::vector<EpsilonRow> rows;
  SpaceTimeField last;  // stored slices at the smallest ε
};

/// Per-ε solves against reference slices already living on the sweep grid.
inline SweepData sweep_rows(const SweepPlan& plan, const ProblemSpec& p, const std::vector<ScalarField>& ref) {
  const std::size_t n = plan.epsilons.size();
  const bool certify = plan.kind != ExperimentKind::heat_baseline;
  const Point x0 = plan.x0.value_or(box_center(p.grid));
  SweepData data;
  data.rows.resize(n);
  parallel_for(n, worker_count(plan.threads, n), [&](std::size_t i) {
    const double eps = plan.epsilons[i];
    EpsilonRow row;
    row.epsilon = eps;
    SpaceTimeField full;
    SpaceTimeField u = snapshot_solve(p, eps, plan.dt, plan.snapshots, certify ? &full : nullptr);
    if (u.size() != ref.size()) throw CompatibilityError("sweep and reference store different time levels");
    for (std::size_t k = 0; k < u.size(); ++k) {
      const Gaps d = gaps(u.slices[k], ref[k]);
      row.sup_error = std::max(row.sup_error, d.sup);
      row.pos_error = std::max(row.pos_error, d.pos);
      row.neg_error = std::max(row.neg_error, d.neg);
    }
    const Gaps d0 = gaps(u.slices.back(), ref.back());
    row.sup_error_t0 = d0.sup;
    row.pos_error_t0 = d0.pos;
    row.neg_error_t0 = d0.neg;
    if (certify) {
      const DensityTrajectory rho = solve_adjoint(adjoint_drift(full, p.hamiltonian, plan.tau), eps, x0);
      row.C_L = lipschitz_certificate(full, rho, eps).C_L;
      if (plan.kind == ExperimentKind::one_sided) {
        row.second_order = weighted_second_order(full, rho, plan.alpha, plan.tau, p).measured;
        row.delta_plus = delta_u_plus_bound(u, *p.M0(), p.source.c_f_integral(p.horizon), p).measured_max;
      }
    }
    data.rows[i] = row;
    if (i + 1 == n) data.last = std::move(u);
  });
  return data;
}

inline double max_gap(const std::vector<ScalarField>& a, const std::vector<ScalarField>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, gaps(a[k], b[k]).sup);
  return m;
}

inline std::vector<ScalarField> restrict_all(const SpaceTimeField& u, const Grid& g) {
  std::vector<ScalarField> out;
  for (const auto& s : u.slices) out.push_back(restrict_to(s, g));
  return out;
}

/// Fit over rows whose error clears the scheme floor by the exclusion factor.
inline RateFit floor_fit(const std::vector<EpsilonRow>& rows, double EpsilonRow::*field, double floor) {
  std::vector<std::pair<double, double>> pairs;
  for (const auto& r : rows)
    if (r.*field > kFitExclusion * floor) pairs.emplace_back(r.epsilon, r.*field);
  try {
    return fit_rate(pairs);
  } catch (const DegenerateFitError&) {
    return RateFit{};
  }
}

}  // namespace detail

/// ε-sweep against a reference limit, with bound reconstruction per experiment kind.
inline RateReport run_sweep(const SweepPlan& plan) {
  validate(plan);
  const ProblemSpec& p = plan.problem;
  const Grid& g = p.grid;
  const int K = plan.snapshots;
  const int n = g.dim();
  const double T = p.horizon;

  RateReport rep;
  rep.kind = plan.kind;
  rep.dim = n;
  rep.horizon = T;
  rep.sweep_cells = g.cells(0);
  rep.beta = plan.beta;
  rep.alpha = plan.alpha;

  // Reference slices on the sweep grid.
  std::vector<ScalarField> ref;
  SpaceTimeField fine_ref;
  if (plan.kind == ExperimentKind::heat_baseline) {
    rep.reference_cells = g.cells(0);
    const ScalarField uT = resolve(p.terminal, g);
    ref.assign(static_cast<std::size_t>(K), uT);
  } else {
    const Grid gf = refine(g, plan.refinement);
    const Grid gh = refine(g, plan.refinement / 2);
    rep.reference_cells = gf.cells(0);
    fine_ref = solve_inviscid(with_grid(p, gf), 0.0, K);
    ref = detail::restrict_all(fine_ref, g);
    const auto half = detail::restrict_all(solve_inviscid(with_grid(p, gh), 0.0, K), g);
    rep.scheme_error = detail::max_gap(ref, half);
    const SpaceTimeField coarse = solve_inviscid(p, 0.0, K);
    rep.sweep_scheme_error = detail::max_gap(ref, coarse.slices);
  }

  detail::SweepData data = detail::sweep_rows(plan, p, ref);
  rep.rows = std::move(data.rows);
  const double eps_min = plan.epsilons.back();

  if (plan.kind == ExperimentKind::heat_baseline) {
    // Richardson estimate at the smallest ε: sweep grid against its refinement by 2.
    const ProblemSpec p2 = with_grid(p, refine(g, 2));
    const SpaceTimeField u2 = detail::snapshot_solve(p2, eps_min, plan.dt > 0.0 ? 0.5 * plan.dt : 0.0, K);
    rep.scheme_error = detail::max_gap(data.last.slices, detail::restrict_all(u2, g));
    rep.sweep_scheme_error = rep.scheme_error;
  }

  double min_gap = std::numeric_limits<double>::infinity(), max_gap = 0.0;
  for (const auto& r : rep.rows) min_gap = std::min(min_gap, r.sup_error), max_gap = std::max(max_gap, r.sup_error);
  rep.degenerate = max_gap <= kErrorFloor;
  rep.inconclusive = !rep.degenerate && rep.scheme_error > kResolutionRatio * min_gap;

  const double floor = std::max(rep.scheme_error, rep.sweep_scheme_error);
  rep.fit = detail::floor_fit(rep.rows, &EpsilonRow::sup_error, floor);
  if (plan.kind == ExperimentKind::one_sided) {
    rep.fit_pos = detail::floor_fit(rep.rows, &EpsilonRow::pos_error, floor);
    rep.fit_neg = detail::floor_fit(rep.rows, &EpsilonRow::neg_error, floor);
  }

  const double collar = plan.collar > 0.0 ? plan.collar : 0.1 * std::min(g.upper(0) - g.lower(0),
                                                                          n == 2 ? g.upper(1) - g.lower(1) : 1e300);
  rep.boundary_influence = boundary_influence(data.last, collar);

  auto add = [&](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  bool bounds_ok = true;

  switch (plan.kind) {
    case ExperimentKind::two_sided: {
      double lo = std::numeric_limits<double>::infinity();
      for (const auto& r : rep.rows) rep.C_L = std::max(rep.C_L, r.C_L), lo = std::min(lo, r.C_L);
      rep.C_L_variation = lo > 0.0 ? (rep.C_L - lo) / lo : 0.0;
      rep.M = 2.0 * std::sqrt(n * rep.C_L);
      for (auto& r : rep.rows) {
        r.bound_upper = r.bound_lower = 2.0 * std::sqrt(n * r.C_L) * std::sqrt(r.epsilon * T);
        r.pass = r.sup_error <= r.bound_upper * kBoundSlack;
        bounds_ok = bounds_ok && r.pass;
      }
      add("sup_error <= 2 sqrt(n C_L) sqrt(eps T)", bounds_ok, "per-eps C_L from the Lipschitz certificate");
      add("C_L uniform in eps", rep.C_L_variation <= kUniformityTolerance,
          "variation " + std::to_string(rep.C_L_variation));
      break;
    }
    case ExperimentKind::one_sided: {
      rep.M0 = *p.M0();
      rep.c_f_integral = p.source.c_f_integral(T);
      rep.K = second_order_bound(n, plan.alpha, T, rep.M0, p.source.c_f_sup(T));
      const double c_int = T * (rep.M0 + rep.c_f_integral);
      double lo = std::numeric_limits<double>::infinity();
      bool second_ok = true, li_yau_ok = true;
      double second_max = 0.0, delta_max = 0.0;
      for (auto& r : rep.rows) {
        rep.C_L = std::max(rep.C_L, r.C_L);
        lo = std::min(lo, r.C_L);
        r.bound_upper = r.epsilon * c_int;
        r.bound_lower = lower_bound_constant(plan.beta, n, rep.K, r.C_L, r.epsilon);
        r.pass = r.pos_error <= r.bound_upper * kBoundSlack && r.neg_error <= r.bound_lower * kBoundSlack;
        bounds_ok = bounds_ok && r.pass;
        second_ok = second_ok && r.second_order <= rep.K * kBoundSlack;
        second_max = std::max(second_max, r.second_order);
        delta_max = std::max(delta_max, r.delta_plus);
        const double ly = rep.M0 + rep.c_f_integral;
        li_yau_ok = li_yau_ok && r.delta_plus <= ly + 0.05 * (1.0 + ly);
      }
      rep.C_L_variation = lo > 0.0 ? (rep.C_L - lo) / lo : 0.0;
      rep.M = 2.0 * std::sqrt(n * rep.C_L);
      for (double b = 0.55; b < 0.951; b += 0.05) {
        double worst = 0.0;
        for (const auto& r : rep.rows)
          worst = std::max(worst, r.neg_error / lower_bound_constant(b, n, rep.K, r.C_L, r.epsilon));
        rep.beta_curve.emplace_back(b, worst);
      }
      add("pos_error <= eps int c", std::all_of(rep.rows.begin(), rep.rows.end(),
                                                [&](const EpsilonRow& r) { return r.pos_error <= r.bound_upper * kBoundSlack; }),
          "c(t) = M0 + int c_f");
      add("neg_error <= lower bound constant", std::all_of(rep.rows.begin(), rep.rows.end(),
                                                           [&](const EpsilonRow& r) { return r.neg_error <= r.bound_lower * kBoundSlack; }),
          "beta = " + std::to_string(plan.beta));
      add("weighted second order <= K", second_ok,
          "max " + std::to_string(second_max) + ", K = " + std::to_string(rep.K));
      add("(Laplacian u_eps)+ <= M0 + int c_f", li_yau_ok,
          "max " + std::to_string(delta_max) + ", bound " + std::to_string(rep.M0 + rep.c_f_integral));
      break;
    }
    case ExperimentKind::heat_baseline: {
      // Fixed-slope fit: log C = mean(log err − ½ log(εT)).
      double s = 0.0;
      std::size_t m = 0;
      for (const auto& r : rep.rows)
        if (r.sup_error > kErrorFloor) s += std::log(r.sup_error / std::sqrt(r.epsilon * T)), ++m;
      rep.heat_constant = m > 0 ? std::exp(s / m) : 0.0;
      for (auto& r : rep.rows) {
        r.bound_upper = r.bound_lower = rep.heat_constant * std::sqrt(r.epsilon * T);
        r.pass = r.sup_error <= r.bound_upper * kBoundSlack + kErrorFloor;
        bounds_ok = bounds_ok && r.pass;
      }
      add("sup_error <= C sqrt(eps T)", bounds_ok, "C = " + std::to_string(rep.heat_constant));
      break;
    }
  }

  if (plan.doubling_check && !rep.degenerate) {
    SweepPlan twice = plan;
    twice.problem = with_grid(p, refine(g, 2));
    twice.dt = plan.dt > 0.0 ? 0.5 * plan.dt : 0.0;
    std::vector<ScalarField> ref2;
    if (plan.kind == ExperimentKind::heat_baseline)
      ref2.assign(static_cast<std::size_t>(K), resolve(p.terminal, twice.problem.grid));
    else
      ref2 = detail::restrict_all(fine_ref, twice.problem.grid);
    const auto rows2 = detail::sweep_rows(twice, twice.problem, ref2).rows;
    const RateFit f2 = detail::floor_fit(rows2, &EpsilonRow::sup_error, 0.5 * floor);
    rep.doubled_exponent = f2.exponent;
    const bool stable = !rep.fit.degenerate && !f2.degenerate &&
                        std::abs(f2.exponent - rep.fit.exponent) <= kDoublingTolerance;
    if (!stable) rep.inconclusive = true;
    add("exponent stable under grid doubling", stable, "doubled exponent " + std::to_string(f2.exponent));
  }

  add("resolution", !rep.inconclusive,
      "scheme error " + std::to_string(rep.scheme_error) + " vs smallest gap " + std::to_string(min_gap));
  rep.pass = !rep.inconclusive &&
             std::all_of(rep.checks.begin(), rep.checks.end(), [](const CheckResult& c) { return c.pass; });
  return rep;
}

inline RateReport one_sided_rates(SweepPlan plan) {
  plan.kind = ExperimentKind::one_sided;
  return run_sweep(plan);
}

inline RateReport heat_baseline(SweepPlan plan) {
  plan.kind = ExperimentKind::heat_baseline;
  return run_sweep(plan);
}

}  // namespace hjlab
