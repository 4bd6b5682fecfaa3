#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "hjlab/errors.hpp"
#include "hjlab/grid.hpp"

namespace hjlab {

enum class HamiltonianKind { quadratic, power, tabulated };

/// Convex, x-independent Hamiltonian H(p).
///
/// power: H(p) = (δ + |p|²)^{γ/2}.  tabulated: piecewise linear in one
/// variable with linear extrapolation past the end nodes.
class HamiltonianSpec {
 public:
  static HamiltonianSpec quadratic() { return HamiltonianSpec(HamiltonianKind::quadratic); }

  static HamiltonianSpec power(double gamma, double delta) {
    if (!(gamma > 1.0) || !std::isfinite(gamma)) throw InputError("power Hamiltonian needs gamma > 1");
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw InputError("power Hamiltonian needs delta >= 0");
    HamiltonianSpec h(HamiltonianKind::power);
    h.gamma_ = gamma;
    h.delta_ = delta;
    return h;
  }

  static HamiltonianSpec tabulated(std::vector<double> nodes, std::vector<double> values) {
    if (nodes.size() < 2 || nodes.size() != values.size())
      throw InputError("tabulated Hamiltonian needs at least two (p, H) pairs");
    for (std::size_t k = 1; k < nodes.size(); ++k)
      if (!(nodes[k] > nodes[k - 1])) throw InputError("tabulated nodes must be strictly increasing");
    for (double v : values)
      if (!std::isfinite(v)) throw InputError("tabulated values must be finite");
    HamiltonianSpec h(HamiltonianKind::tabulated);
    h.nodes_ = std::move(nodes);
    h.values_ = std::move(values);
    return h;
  }

  /// H ≡ 0; turns the viscous problem into the backward heat equation.
  static HamiltonianSpec zero() { return tabulated({-1.0, 1.0}, {0.0, 0.0}); }

  HamiltonianKind kind() const { return kind_; }
  double gamma() const { return kind_ == HamiltonianKind::quadratic ? 2.0 : gamma_; }
  double delta() const { return delta_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }

  bool is_zero() const {
    return kind_ == HamiltonianKind::tabulated &&
           std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
  }

  std::string name() const {
    switch (kind_) {
      case HamiltonianKind::quadratic: return "quadratic";
      case HamiltonianKind::power: return "power";
      case HamiltonianKind::tabulated: return is_zero() ? "zero" : "tabulated";
    }
    return "?";
  }

  double eval(std::span<const double> p) const {
    check(p);
    switch (kind_) {
      case HamiltonianKind::quadratic: return norm_sq(p);
      case HamiltonianKind::power: return std::pow(delta_ + norm_sq(p), 0.5 * gamma_);
      case HamiltonianKind::tabulated: {
        const std::size_t k = segment(p[0]);
        return values_[k] + slope(k) * (p[0] - nodes_[k]);
      }
    }
    return 0.0;
  }

  /// D_pH(p). For δ = 0 and γ < 2 the gradient at p = 0 is taken to be 0.
  Point grad(std::span<const double> p) const {
    check(p);
    Point g{0.0, 0.0};
    switch (kind_) {
      case HamiltonianKind::quadratic:
        for (std::size_t i = 0; i < p.size(); ++i) g[i] = 2.0 * p[i];
        break;
      case HamiltonianKind::power: {
        const double base = delta_ + norm_sq(p);
        if (base == 0.0) break;
        const double scale = gamma_ * std::pow(base, 0.5 * gamma_ - 1.0);
        for (std::size_t i = 0; i < p.size(); ++i) g[i] = scale * p[i];
        break;
      }
      case HamiltonianKind::tabulated:
        g[0] = slope(segment(p[0]));
        break;
    }
    return g;
  }

  /// sup over |q| ≤ radius of max_i |∂H/∂p_i(q)|.
  double component_bound(double radius) const {
    radius = std::abs(radius);
    switch (kind_) {
      case HamiltonianKind::quadratic: return 2.0 * radius;
      case HamiltonianKind::power:
        // γ r (δ + r²)^{(γ−2)/2} is non-decreasing in r for γ > 1.
        if (delta_ == 0.0 && radius == 0.0) return 0.0;
        return gamma_ * radius * std::pow(delta_ + radius * radius, 0.5 * gamma_ - 1.0);
      case HamiltonianKind::tabulated: {
        double m = 0.0;
        const std::size_t lo = segment(-radius), hi = segment(radius);
        for (std::size_t k = lo; k <= hi; ++k) m = std::max(m, std::abs(slope(k)));
        return m;
      }
    }
    return 0.0;
  }

 private:
  explicit HamiltonianSpec(HamiltonianKind k) : kind_(k) {}

  static double norm_sq(std::span<const double> p) {
    double s = 0.0;
    for (double v : p) s += v * v;
    return s;
  }

  void check(std::span<const double> p) const {
    if (p.empty() || p.size() > 2) throw InputError("momentum must have one or two components");
    for (double v : p)
      if (!std::isfinite(v)) throw InputError("non-finite momentum");
    if (kind_ == HamiltonianKind::tabulated && p.size() != 1)
      throw InputError("tabulated Hamiltonians are one-dimensional");
  }

  // Segment index k such that p lies in [nodes[k], nodes[k+1]], extended at the ends.
  std::size_t segment(double p) const {
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), p);
    const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - nodes_.begin() - 1));
    return std::min(k, nodes_.size() - 2);
  }
  double slope(std::size_t k) const {
    return (values_[k + 1] - values_[k]) / (nodes_[k + 1] - nodes_[k]);
  }

  HamiltonianKind kind_;
  double gamma_ = 2.0;
  double delta_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> values_;
};

/// Lax–Friedrichs numerical Hamiltonian
///   H((p⁻ + p⁺)/2) − Σ_i σ_i (p⁺_i − p⁻_i)/2,
/// monotone whenever σ_i dominates |∂H/∂p_i| over the range of the arguments.
inline double lax_friedrichs(const HamiltonianSpec& h, std::span<const double> p_minus,
                             std::span<const double> p_plus, std::span<const double> sigma) {
  if (p_minus.size() != p_plus.size() || sigma.size() != p_minus.size())
    throw InputError("lax_friedrichs: dimension mismatch");
  Point mid{0.0, 0.0};
  double dissipation = 0.0;
  for (std::size_t i = 0; i < p_minus.size(); ++i) {
    if (!(sigma[i] >= 0.0)) throw InputError("lax_friedrichs: sigma must be non-negative");
    mid[i] = 0.5 * (p_minus[i] + p_plus[i]);
    dissipation += sigma[i] * (p_plus[i] - p_minus[i]);
  }
  return h.eval(std::span<const double>(mid.data(), p_minus.size())) - 0.5 * dissipation;
}

}  // namespace hjlab
