#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hjlab/diffusion.hpp"
#include "hjlab/errors.hpp"
#include "hjlab/grid.hpp"
#include "hjlab/hamiltonian.hpp"
#include "hjlab/hj_solver.hpp"

namespace hjlab {

/// Cell-centered velocity b(x,t) on increasing times τ = t_0 < … < t_K = T.
/// The step t_m → t_{m+1} uses drift[m + 1].
struct DriftTrajectory {
  Grid grid;
  std::vector<double> times;
  std::vector<VectorField> drift;
};

/// b = −D_pH(Du_ε) from the slices of u with t ≥ τ (τ must be a stored time).
inline DriftTrajectory adjoint_drift(const SpaceTimeField& u, const HamiltonianSpec& h, double tau) {
  const auto start = u.find(tau);
  if (!start) throw RangeError("tau is not a stored time of the trajectory");
  DriftTrajectory d;
  d.grid = u.grid;
  const int dim = u.grid.dim();
  for (std::size_t k = *start + 1; k-- > 0;) {
    const VectorField du = gradient(u.slices[k]);
    VectorField b(u.grid);
    for (std::size_t c = 0; c < u.grid.size(); ++c) {
      Point p{du.components[0][c], dim == 2 ? du.components[1][c] : 0.0};
      const Point g = h.grad(std::span<const double>(p.data(), dim));
      for (int a = 0; a < dim; ++a) b.components[a][c] = -g[a];
    }
    d.times.push_back(u.times[k]);
    d.drift.push_back(std::move(b));
  }
  return d;
}

/// Time-dependent velocity given in closed form, sampled on `steps` uniform steps of [τ, T].
inline DriftTrajectory sampled_drift(const Grid& g, const std::function<Point(const Point&, double)>& b,
                                     double tau, double T, int steps) {
  if (!(T > tau) || steps < 1) throw InputError("sampled_drift: need T > tau and steps >= 1");
  DriftTrajectory d;
  d.grid = g;
  for (int m = 0; m <= steps; ++m) {
    const double t = m == steps ? T : tau + (T - tau) * m / steps;
    VectorField v(g);
    for (std::size_t c = 0; c < g.size(); ++c) {
      const Point bc = b(g.center_of(c), t);
      for (int a = 0; a < g.dim(); ++a) v.components[a][c] = bc[a];
    }
    d.times.push_back(t);
    d.drift.push_back(std::move(v));
  }
  return d;
}

namespace detail {
/// Neumaier-compensated sum.
inline double compensated_sum(std::span<const double> v) {
  double s = 0.0, c = 0.0;
  for (double x : v) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + c;
}
}  // namespace detail

/// One step of the conservative finite-volume Fokker–Planck scheme
///   ∂_t ρ − εΔρ + div(bρ) = 0,  zero total flux on every boundary face:
/// implicit reflected diffusion followed by explicit upwind advection.
/// `transpose_apply` is the exact transpose, i.e. the backward step of the
/// linearized Hamilton–Jacobi equation with upwind transport.
class AdjointStep {
 public:
  AdjointStep(const VectorField& drift, double eps, double dt)
      : grid_(drift.grid), dt_(dt), diffusion_(drift.grid, dt * eps) {
    if (!(eps >= 0.0) || !(dt > 0.0)) throw InputError("AdjointStep: need eps >= 0 and dt > 0");
    const Grid& g = grid_;
    double rate = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      face_drift_[a].assign(g.size(), 0.0);
      double bmax = 0.0;
      for (std::size_t c = 0; c < g.size(); ++c) {
        if (g.coord(c, a) == g.cells(a) - 1) continue;
        const double b = 0.5 * (drift.components[a][c] + drift.components[a][c + g.stride(a)]);
        if (!std::isfinite(b)) throw InputError("drift is not finite");
        face_drift_[a][c] = b;
        bmax = std::max(bmax, std::abs(b));
      }
      rate += bmax / g.spacing(a);
    }
    if (dt * rate > 0.5 * (1.0 + 1e-12))
      throw StabilityError("adjoint step violates dt <= h / (2 max|b|): dt = " + std::to_string(dt));
  }

  /// ρ ← A D⁻¹ ρ. The diffusion solve is rescaled to its exact column sums.
  void forward(std::vector<double>& rho) const {
    const double before = detail::compensated_sum(rho);
    diffusion_.apply_inverse(rho);
    const double after = detail::compensated_sum(rho);
    if (after != 0.0 && before != after)
      for (double& v : rho) v *= before / after;
    const Grid& g = grid_;
    out_.assign(rho.begin(), rho.end());
    for (int a = 0; a < g.dim(); ++a) {
      const double k = dt_ / g.spacing(a);
      const std::size_t s = g.stride(a);
      for (std::size_t c = 0; c < g.size(); ++c) {
        if (g.coord(c, a) == g.cells(a) - 1) continue;
        const double b = face_drift_[a][c];
        const double flux = std::max(b, 0.0) * rho[c] + std::min(b, 0.0) * rho[c + s];
        out_[c] -= k * flux;
        out_[c + s] += k * flux;
      }
    }
    rho.swap(out_);
  }

  /// φ ← D⁻¹ Aᵀ φ.
  void transpose_apply(std::vector<double>& phi) const {
    const Grid& g = grid_;
    out_.assign(phi.begin(), phi.end());
    for (int a = 0; a < g.dim(); ++a) {
      const double k = dt_ / g.spacing(a);
      const std::size_t s = g.stride(a);
      for (std::size_t c = 0; c < g.size(); ++c) {
        if (g.coord(c, a) == g.cells(a) - 1) continue;
        const double b = face_drift_[a][c];
        const double d = phi[c + s] - phi[c];
        out_[c] += k * std::max(b, 0.0) * d;
        out_[c + s] += k * std::min(b, 0.0) * d;
      }
    }
    phi.swap(out_);
    diffusion_.apply_inverse(phi);
  }

 private:
  Grid grid_;
  double dt_;
  NeumannDiffusion diffusion_;
  std::array<std::vector<double>, 2> face_drift_;
  mutable std::vector<double> out_;
};

inline constexpr double kPositivityFloor = -1e-14;

/// Density ρ_ε on increasing times with per-step mass and minimum ledgers.
struct DensityTrajectory {
  Grid grid;
  std::vector<double> times;
  std::vector<ScalarField> densities;
  std::vector<double> mass_ledger;
  std::vector<double> min_ledger;
};

namespace detail {
inline double total_mass(const Grid& g, std::span<const double> rho) {
  return compensated_sum(rho) * g.cell_volume();
}
}  // namespace detail

/// Adjoint problem from the discrete Dirac mass at x0 (all mass in the containing cell).
inline DensityTrajectory solve_adjoint(const DriftTrajectory& drift, double eps, const Point& x0,
                                       double initial_mass = 1.0) {
  if (!(eps > 0.0)) throw InputError("solve_adjoint needs eps > 0");
  if (drift.times.size() < 2 || drift.drift.size() != drift.times.size())
    throw InputError("drift trajectory needs at least two time levels");
  const Grid& g = drift.grid;
  DensityTrajectory out;
  out.grid = g;
  std::vector<double> rho(g.size(), 0.0);
  rho[g.locate(x0)] = initial_mass / g.cell_volume();
  auto record = [&](double t) {
    const double lo = *std::min_element(rho.begin(), rho.end());
    if (lo < kPositivityFloor)
      throw PositivityFault("density minimum " + std::to_string(lo) + " at t = " + std::to_string(t));
    out.times.push_back(t);
    out.densities.emplace_back(g, rho, t);
    out.mass_ledger.push_back(detail::total_mass(g, rho));
    out.min_ledger.push_back(lo);
  };
  record(drift.times.front());
  for (std::size_t m = 0; m + 1 < drift.times.size(); ++m) {
    const double dt = drift.times[m + 1] - drift.times[m];
    if (!(dt > 0.0)) throw InputError("drift times must be strictly increasing");
    AdjointStep(drift.drift[m + 1], eps, dt).forward(rho);
    record(drift.times[m + 1]);
  }
  return out;
}

/// Total mass at the stored step nearest to t.
inline double mass(const DensityTrajectory& r, double t) {
  const double tol = 1e-12 * std::max(1.0, std::abs(r.times.back()));
  if (r.times.empty() || t < r.times.front() - tol || t > r.times.back() + tol)
    throw RangeError("t outside the span of the density trajectory");
  const auto it = std::lower_bound(r.times.begin(), r.times.end(), t);
  std::size_t k = static_cast<std::size_t>(it - r.times.begin());
  if (k == r.times.size()) --k;
  if (k > 0 && std::abs(r.times[k - 1] - t) < std::abs(r.times[k] - t)) --k;
  return r.mass_ledger[k];
}

/// ∫ w(t) ∫_Ω field·ρ dx dt: trapezoid in time over the density's steps, cell sums in space.
inline double pair(const DensityTrajectory& r, const SpaceTimeField& field, const std::function<double(double)>& weight) {
  if (!(r.grid == field.grid)) throw CompatibilityError("pair: grids differ");
  const double vol = r.grid.cell_volume();
  std::vector<double> g(r.times.size());
  for (std::size_t m = 0; m < r.times.size(); ++m) {
    const auto k = field.find(r.times[m]);
    if (!k) throw CompatibilityError("pair: field has no slice at t = " + std::to_string(r.times[m]));
    const auto& f = field.slices[*k].values;
    const auto& rho = r.densities[m].values;
    double s = 0.0;
    for (std::size_t c = 0; c < f.size(); ++c) s += f[c] * rho[c];
    g[m] = weight(r.times[m]) * s * vol;
  }
  double total = 0.0;
  for (std::size_t m = 0; m + 1 < g.size(); ++m) total += 0.5 * (r.times[m + 1] - r.times[m]) * (g[m] + g[m + 1]);
  return total;
}

/// Pointwise map over every slice of a trajectory.
template <typename Fn>
SpaceTimeField map_slices(const SpaceTimeField& u, Fn&& fn) {
  SpaceTimeField out;
  out.grid = u.grid;
  out.times = u.times;
  out.dt = u.dt;
  for (const auto& s : u.slices) out.slices.push_back(fn(s));
  return out;
}

}  // namespace hjlab
