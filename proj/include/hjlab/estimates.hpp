#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "hjlab/errors.hpp"
#include "hjlab/fp_adjoint.hpp"
#include "hjlab/grid.hpp"
#include "hjlab/hj_solver.hpp"

namespace hjlab {

/// sup|Du_ε| plus the ρ-weighted viscous dissipation 2ε∬|D²u_ε|²ρ.
struct LipschitzCertificate {
  double sup_grad = 0.0;
  double weighted_hess = 0.0;
  double C_L = 0.0;
  double epsilon = 0.0;
};

struct SecondOrderCertificate {
  double alpha = 1.5;
  double measured = 0.0;
  double K = 0.0;
  double M0 = 0.0;
  double c_f = 0.0;
  bool pass = false;
};

struct DeltaPlusCertificate {
  double measured_max = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct OneSided {
  double pos = 0.0;
  double neg = 0.0;
};

struct DualityCheck {
  double lhs = 0.0;           // ∫ v(τ) ρ(τ)
  double rhs_terminal = 0.0;  // ∫ v(T) ρ(T)
  double rhs_integral = 0.0;  // ∬ Δu_ε ρ
  double residual = 0.0;      // |lhs − rhs| / (1 + |lhs|)
};

inline constexpr double kBoundSlack = 1.05;

inline double max_gradient_norm(const SpaceTimeField& u) {
  double m = 0.0;
  for (const auto& s : u.slices) {
    const VectorField du = gradient(s);
    for (std::size_t c = 0; c < s.size(); ++c) m = std::max(m, du.norm_sq(c));
  }
  return std::sqrt(m);
}

inline SpaceTimeField hessian_sq_field(const SpaceTimeField& u) {
  return map_slices(u, [](const ScalarField& s) { return hessian_frobenius_sq(s); });
}

inline SpaceTimeField laplacian_field(const SpaceTimeField& u) {
  return map_slices(u, [](const ScalarField& s) { return laplacian(s); });
}

inline LipschitzCertificate lipschitz_certificate(const SpaceTimeField& u, const DensityTrajectory& rho, double eps) {
  if (!(u.grid == rho.grid)) throw CompatibilityError("lipschitz_certificate: grids differ");
  LipschitzCertificate c;
  c.epsilon = eps;
  c.sup_grad = max_gradient_norm(u);
  c.weighted_hess = 2.0 * eps * pair(rho, hessian_sq_field(u), [](double) { return 1.0; });
  c.C_L = c.sup_grad + c.weighted_hess;
  return c;
}

inline void require_second_order_hypotheses(const ProblemSpec& p) {
  const auto k = p.hamiltonian.kind();
  if (k != HamiltonianKind::quadratic && k != HamiltonianKind::power)
    throw HypothesisError("the Laplacian bound needs H(p) = |p|^gamma");
  if (!p.flags.semi_superharmonic_terminal)
    throw HypothesisError("terminal datum '" + p.terminal.name + "' is not certified semi-superharmonic");
  if (!p.flags.source_delta_bound) throw HypothesisError("source '" + p.source.name + "' has no bound on its Laplacian");
  if (!p.flags.source_normal_nonneg)
    throw HypothesisError("source '" + p.source.name + "' violates the outward normal-derivative sign");
}

/// max over interior cells and stored times of (Δu_ε)⁺ against M_0 + ∫c_f.
inline DeltaPlusCertificate delta_u_plus_bound(const SpaceTimeField& u, double M0, double c_f_integral,
                                               const ProblemSpec& p) {
  require_second_order_hypotheses(p);
  DeltaPlusCertificate out;
  for (const auto& s : u.slices) {
    const ScalarField lap = laplacian(s);
    for (std::size_t c = 0; c < lap.size(); ++c)
      if (u.grid.depth(c) >= 1) out.measured_max = std::max(out.measured_max, lap[c]);
  }
  out.bound = M0 + c_f_integral;
  out.pass = out.measured_max <= out.bound + 0.05 * (1.0 + out.bound);
  return out;
}

/// K = nα²T^{α−1}/(4(α−1)) + T^α M_0 + T^{α+1} c_f/(α+1).
inline double second_order_bound(int n, double alpha, double T, double M0, double c_f) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw InputError("alpha must lie in (1, 2)");
  return n * alpha * alpha * std::pow(T, alpha - 1.0) / (4.0 * (alpha - 1.0)) + std::pow(T, alpha) * M0 +
         std::pow(T, alpha + 1.0) * c_f / (alpha + 1.0);
}

/// ∬ (t−τ)^α |D²u_ε|² ρ_ε against K; c_f is the sup of c_f(t) over [0, T].
inline SecondOrderCertificate weighted_second_order(const SpaceTimeField& u, const DensityTrajectory& rho,
                                                    double alpha, double tau, const ProblemSpec& p) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw InputError("alpha must lie in (1, 2)");
  if (p.hamiltonian.kind() != HamiltonianKind::quadratic)
    throw HypothesisError("the weighted second-order bound needs H(p) = |p|^2");
  require_second_order_hypotheses(p);
  SecondOrderCertificate out;
  out.alpha = alpha;
  out.M0 = *p.M0();
  out.c_f = p.source.c_f_sup(p.horizon);
  out.K = second_order_bound(p.grid.dim(), alpha, p.horizon, out.M0, out.c_f);
  out.measured = pair(rho, hessian_sq_field(u), [=](double t) { return std::pow(std::max(0.0, t - tau), alpha); });
  out.pass = out.measured <= out.K * kBoundSlack;
  return out;
}

/// (1/β)·√(nK/(2(1−β)))·ε^β + √(n C_L)·ε.
inline double lower_bound_constant(double beta, int n, double K, double C_L, double eps) {
  if (!(beta > 0.5 && beta < 1.0)) throw InputError("beta must lie in (1/2, 1)");
  if (K < 0.0 || C_L < 0.0) throw InputError("K and C_L must be non-negative");
  return std::sqrt(n * K / (2.0 * (1.0 - beta))) / beta * std::pow(eps, beta) + std::sqrt(n * C_L) * eps;
}

/// (max(0, max(u_ε − u)), max(0, max(u − u_ε))).
inline OneSided one_sided_sup(const ScalarField& u_eps, const ScalarField& u) {
  if (!(u_eps.grid == u.grid)) throw CompatibilityError("one_sided_sup: grids differ");
  OneSided r;
  for (std::size_t c = 0; c < u.size(); ++c) {
    const double d = u_eps[c] - u[c];
    r.pos = std::max(r.pos, d);
    r.neg = std::max(r.neg, -d);
  }
  return r;
}

/// Representation formula check: v^ε(x0, τ) against ∫v^ε(T)ρ(T) + ∬Δu ρ.
///
/// v^ε is the divided difference (u_{ε+η} − u_ε)/η, a centered approximation
/// of ∂_ε u at ε + η/2; the adjoint side (drift, ρ, Δu) is evaluated at that
/// same viscosity so the check is second order in η.
inline DualityCheck duality_residual(const ProblemSpec& p, double eps, double eta, const Point& x0, double tau,
                                     double dt = 0.0) {
  if (!(eta > 0.0) || eta > 0.5 * eps) throw InputError("eta must lie in (0, eps/2]");
  if (!(dt > 0.0)) dt = auto_time_step(p);
  const SpaceTimeField u_lo = solve_viscous(p, eps, dt);
  const SpaceTimeField u_hi = solve_viscous(p, eps + eta, dt);
  const double eps_mid = eps + 0.5 * eta;
  const SpaceTimeField u_mid = solve_viscous(p, eps_mid, dt);
  const auto kt = u_mid.find(tau);
  if (!kt) throw RangeError("tau must coincide with a time level of the solve");
  const DensityTrajectory rho = solve_adjoint(adjoint_drift(u_mid, p.hamiltonian, tau), eps_mid, x0);
  const double vol = p.grid.cell_volume();
  auto v_pair = [&](std::size_t k, const ScalarField& r) {
    double s = 0.0;
    for (std::size_t c = 0; c < r.size(); ++c) s += (u_hi.slices[k][c] - u_lo.slices[k][c]) / eta * r[c];
    return s * vol;
  };
  DualityCheck out;
  out.lhs = v_pair(*kt, rho.densities.front());
  out.rhs_terminal = v_pair(0, rho.densities.back());
  out.rhs_integral = pair(rho, laplacian_field(u_mid), [](double) { return 1.0; });
  out.residual = std::abs(out.lhs - out.rhs_terminal - out.rhs_integral) / (1.0 + std::abs(out.lhs));
  return out;
}

}  // namespace hjlab
