#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hjlab/catalog.hpp"
#include "hjlab/diffusion.hpp"
#include "hjlab/errors.hpp"
#include "hjlab/grid.hpp"
#include "hjlab/hamiltonian.hpp"

namespace hjlab {

struct HypothesisFlags {
  bool lipschitz_data = false;
  // ‖(Δu_T)⁺‖ ≤ M_0 for the even reflection of u_T, i.e. M_0 declared and ∂_ν u_T ≥ 0.
  bool semi_superharmonic_terminal = false;
  bool source_delta_bound = false;  // Δf ≤ c_f
  bool source_normal_nonneg = false;  // ∂_ν f ≥ 0
};

/// Terminal-value problem  −∂_t u − εΔu + H(Du) = f,  ∂_ν u = 0,  u(T) = u_T.
struct ProblemSpec {
  Grid grid;
  double horizon = 1.0;
  HamiltonianSpec hamiltonian = HamiltonianSpec::quadratic();
  TerminalDatum terminal;
  SourceTerm source;
  HypothesisFlags flags;
  DatumChecks terminal_checks;
  DatumChecks source_checks;

  std::optional<double> M0() const {
    return flags.semi_superharmonic_terminal ? terminal.delta_plus_bound : std::nullopt;
  }
};

inline ProblemSpec make_problem(const Grid& grid, double horizon, HamiltonianSpec h, TerminalDatum terminal,
                                SourceTerm source) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InputError("horizon T must be positive");
  if (h.kind() == HamiltonianKind::tabulated && grid.dim() != 1)
    throw InputError("tabulated Hamiltonians require a one-dimensional grid");
  ProblemSpec p{grid, horizon, std::move(h), std::move(terminal), std::move(source), {}, {}, {}};
  p.terminal_checks = verify_terminal(p.terminal, grid);
  p.source_checks = verify_source(p.source, grid, horizon);
  p.flags.lipschitz_data = p.terminal_checks.lipschitz;
  p.flags.semi_superharmonic_terminal = p.terminal_checks.delta_bound && p.terminal_checks.normal_nonneg;
  p.flags.source_delta_bound = p.source_checks.delta_bound;
  p.flags.source_normal_nonneg = p.source_checks.normal_nonneg;
  return p;
}

inline ProblemSpec make_problem(const Grid& grid, double horizon, HamiltonianSpec h, const std::string& terminal,
                                const std::string& source, const Params& terminal_params = {},
                                const Params& source_params = {}) {
  return make_problem(grid, horizon, std::move(h), Catalog::terminal(terminal, grid.dim(), terminal_params),
                      Catalog::source(source, grid.dim(), source_params));
}

/// Same problem on another grid over the same box.
inline ProblemSpec with_grid(const ProblemSpec& p, const Grid& g) {
  for (int a = 0; a < g.dim(); ++a)
    if (g.dim() != p.grid.dim() || !(g.extent(a) == p.grid.extent(a)))
      throw CompatibilityError("with_grid: the new grid must cover the same box");
  ProblemSpec q = p;
  q.grid = g;
  return q;
}

/// Samples u(·, t_k) with t_k strictly decreasing from T to 0.
struct SpaceTimeField {
  Grid grid;
  std::vector<double> times;
  std::vector<ScalarField> slices;
  double dt = 0.0;

  std::size_t size() const { return slices.size(); }

  /// Index of the slice at time t (within a relative tolerance), if any.
  std::optional<std::size_t> find(double t, double tol = 1e-9) const {
    const double scale = std::max(1.0, times.empty() ? 1.0 : std::abs(times.front()));
    for (std::size_t k = 0; k < times.size(); ++k)
      if (std::abs(times[k] - t) <= tol * scale) return k;
    return std::nullopt;
  }
  const ScalarField& at(double t) const {
    auto k = find(t);
    if (!k) throw RangeError("no slice stored at t = " + std::to_string(t));
    return slices[*k];
  }
  const ScalarField& final_slice() const { return slices.back(); }
};

namespace detail {

inline double fast_hamiltonian(const HamiltonianSpec& h, const double* p, int dim) {
  if (h.kind() == HamiltonianKind::quadratic) return dim == 1 ? p[0] * p[0] : p[0] * p[0] + p[1] * p[1];
  return h.eval(std::span<const double>(p, dim));
}

// max over cells of |(max(|p⁻_a|, |p⁺_a|))_a|: radius of a ball containing every stencil momentum.
inline double momentum_radius(const Grid& g, std::span<const double> u) {
  double r2 = 0.0;
  const std::size_t n = g.size();
  for (std::size_t c = 0; c < n; ++c) {
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const double inv = 1.0 / g.spacing(a);
      const double pm = (u[c] - u[g.neighbor(c, a, -1)]) * inv;
      const double pp = (u[g.neighbor(c, a, +1)] - u[c]) * inv;
      const double m = std::max(std::abs(pm), std::abs(pp));
      s += m * m;
    }
    r2 = std::max(r2, s);
  }
  return std::sqrt(r2);
}

}  // namespace detail

inline constexpr double kSigmaSafety = 1.1;

/// Explicit time-step bound dt ≤ 1 / (2 Σ_a σ_a / h_a) for a given σ.
inline double cfl_limit(const Grid& g, double sigma) {
  double rate = 0.0;
  for (int a = 0; a < g.dim(); ++a) rate += sigma / g.spacing(a);
  return rate > 0.0 ? 0.5 / rate : std::numeric_limits<double>::infinity();
}

/// A priori bound on the momentum range: Lip(u_T) + ∫_0^T Lip f(·,t) dt
/// measured with one-sided differences on the grid, plus 5 %.
inline double a_priori_momentum_bound(const ProblemSpec& p) {
  const Grid& g = p.grid;
  const ScalarField uT = resolve(p.terminal, g);
  double bound = detail::momentum_radius(g, uT.values);
  if (!p.source.modes.empty()) {
    const int m = 32;
    double integral = 0.0;
    for (int k = 0; k <= m; ++k) {
      const double t = p.horizon * k / m;
      const ScalarField f = resolve(p.source, g, t);
      const double w = (k == 0 || k == m) ? 0.5 : 1.0;
      integral += w * detail::momentum_radius(g, f.values) * p.horizon / m;
    }
    bound += integral;
  }
  return 1.05 * bound;
}

/// Automatic time step: CFL for the a priori momentum bound, capped at h_min and T/8.
inline double auto_time_step(const ProblemSpec& p) {
  const double sigma = kSigmaSafety * p.hamiltonian.component_bound(a_priori_momentum_bound(p));
  return std::min({cfl_limit(p.grid, sigma), p.grid.min_spacing(), p.horizon / 8.0});
}

/// One IMEX step in reversed time s = T − t:
///   u* = uⁿ − ds·Ĥ_LF(D⁻uⁿ, D⁺uⁿ) + ds·f(tₙ),   (I − ds·ε·L) uⁿ⁺¹ = u*.
class HjMarcher {
 public:
  /// dt ≤ 0 selects auto_time_step. The step count is rounded up to a multiple of step_multiple.
  HjMarcher(const ProblemSpec& p, double eps, double dt, int step_multiple = 1) : p_(p), eps_(eps) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw InputError("viscosity must be finite and >= 0");
    if (!(dt > 0.0)) dt = auto_time_step(p);
    if (!std::isfinite(dt)) throw InputError("time step must be finite");
    step_multiple = std::max(1, step_multiple);
    steps_ = static_cast<int>(std::ceil(p.horizon / dt - 1e-9));
    steps_ = std::max(1, (steps_ + step_multiple - 1) / step_multiple * step_multiple);
    dt_ = p.horizon / steps_;
    diffusion_ = NeumannDiffusion(p.grid, dt_ * eps);
    for (const auto& mode : p.source.modes) {
      ScalarField phi = sample(p.grid, mode.space_factor);
      space_factors_.push_back(std::move(phi.values));
    }
  }

  double dt() const { return dt_; }
  int steps() const { return steps_; }
  double epsilon() const { return eps_; }
  const ProblemSpec& problem() const { return p_; }
  /// Problem time of the state after n steps.
  double time_at(int n) const { return n == steps_ ? 0.0 : p_.horizon - n * dt_; }

  std::vector<double> initial_state() const { return resolve(p_.terminal, p_.grid).values; }

  /// Advance from step n to n+1.
  void step(std::vector<double>& u, int n) const {
    const Grid& g = p_.grid;
    const int dim = g.dim();
    const double t = time_at(n);
    const double sigma = kSigmaSafety * p_.hamiltonian.component_bound(detail::momentum_radius(g, u));
    const double limit = cfl_limit(g, sigma);
    if (dt_ > limit * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "time step " << dt_ << " exceeds the stability limit " << limit << " (sigma = " << sigma
         << ") at t = " << t;
      throw StabilityError(os.str());
    }
    scratch_.resize(u.size());
    std::array<double, 2> inv_h{1.0 / g.spacing(0), dim == 2 ? 1.0 / g.spacing(1) : 0.0};
    std::vector<double> weights;
    for (const auto& mode : p_.source.modes) weights.push_back(mode.time_factor(t));
    const bool zero_h = p_.hamiltonian.is_zero();
    for (std::size_t c = 0; c < u.size(); ++c) {
      double mid[2] = {0.0, 0.0};
      double jump = 0.0;
      for (int a = 0; a < dim; ++a) {
        const double pm = (u[c] - u[g.neighbor(c, a, -1)]) * inv_h[a];
        const double pp = (u[g.neighbor(c, a, +1)] - u[c]) * inv_h[a];
        mid[a] = 0.5 * (pm + pp);
        jump += pp - pm;
      }
      double hnum = zero_h ? 0.0 : detail::fast_hamiltonian(p_.hamiltonian, mid, dim) - 0.5 * sigma * jump;
      double f = 0.0;
      for (std::size_t k = 0; k < weights.size(); ++k) f += weights[k] * space_factors_[k][c];
      scratch_[c] = u[c] - dt_ * hnum + dt_ * f;
    }
    u.swap(scratch_);
    diffusion_.apply_inverse(u);
    for (double v : u)
      if (!std::isfinite(v)) throw SolverError("non-finite value after step " + std::to_string(n + 1));
  }

 private:
  ProblemSpec p_;
  double eps_;
  double dt_ = 0.0;
  int steps_ = 0;
  NeumannDiffusion diffusion_;
  std::vector<std::vector<double>> space_factors_;
  mutable std::vector<double> scratch_;
};

/// snapshots = 0 keeps every step; otherwise that many uniformly spaced slices (≥ 2).
inline SpaceTimeField march(const HjMarcher& m, int snapshots) {
  if (snapshots == 1 || snapshots < 0) throw InputError("snapshots must be 0 or at least 2");
  const int every = snapshots == 0 ? 1 : m.steps() / (snapshots - 1);
  SpaceTimeField out;
  out.grid = m.problem().grid;
  out.dt = m.dt();
  std::vector<double> u = m.initial_state();
  auto keep = [&](int n) {
    out.times.push_back(m.time_at(n));
    out.slices.emplace_back(out.grid, u, m.time_at(n));
  };
  keep(0);
  for (int n = 0; n < m.steps(); ++n) {
    m.step(u, n);
    if ((n + 1) % every == 0) keep(n + 1);
  }
  return out;
}

inline SpaceTimeField solve_viscous(const ProblemSpec& p, double eps, double dt = 0.0, int snapshots = 0) {
  if (!(eps > 0.0)) throw InputError("solve_viscous needs eps > 0");
  return march(HjMarcher(p, eps, dt, snapshots > 1 ? snapshots - 1 : 1), snapshots);
}

inline SpaceTimeField solve_inviscid(const ProblemSpec& p, double dt = 0.0, int snapshots = 0) {
  return march(HjMarcher(p, 0.0, dt, snapshots > 1 ? snapshots - 1 : 1), snapshots);
}

/// Divided difference (u_{ε+η} − u_ε)/η of two solves sharing u_T and the time grid.
inline SpaceTimeField epsilon_derivative(const ProblemSpec& p, double eps, double eta, double dt = 0.0,
                                         int snapshots = 0) {
  if (!(eta > 0.0) || eta > 0.5 * eps) throw InputError("eta must lie in (0, eps/2]");
  if (!(dt > 0.0)) dt = auto_time_step(p);
  const SpaceTimeField lo = solve_viscous(p, eps, dt, snapshots);
  const SpaceTimeField hi = solve_viscous(p, eps + eta, dt, snapshots);
  SpaceTimeField v = lo;
  for (std::size_t k = 0; k < v.size(); ++k)
    for (std::size_t c = 0; c < v.grid.size(); ++c)
      v.slices[k][c] = (hi.slices[k][c] - lo.slices[k][c]) / eta;
  return v;
}

}  // namespace hjlab
