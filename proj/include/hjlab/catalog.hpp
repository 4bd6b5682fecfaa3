#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hjlab/errors.hpp"
#include "hjlab/grid.hpp"

namespace hjlab {

using Params = std::map<std::string, double>;

/// Terminal datum u_T with closed-form derivatives and declared hypotheses.
struct TerminalDatum {
  std::string name;
  Params params;
  int dim = 1;
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;
  // Empty when Δu_T is only a measure with a positive singular part.
  std::function<double(const Point&)> laplacian;
  // Declared Lipschitz constant on a given box; nullopt when not Lipschitz.
  std::function<std::optional<double>(const Grid&)> lipschitz;
  // Declared M_0 ≥ ‖(Δu_T)⁺‖_∞; nullopt means unbounded.
  std::optional<double> delta_plus_bound;
};

/// f(x,t) = Σ_k g_k(t) φ_k(x).
struct SourceMode {
  std::function<double(double)> time_factor;
  std::function<double(const Point&)> space_factor;
};

/// Source term with the one-sided Laplacian bound Δf ≤ c_f(t) = c0 + c1·t when declared.
struct SourceTerm {
  std::string name;
  Params params;
  int dim = 1;
  std::vector<SourceMode> modes;
  std::function<Point(const Point&, double)> gradient;
  std::function<double(const Point&, double)> laplacian;
  std::optional<std::array<double, 2>> delta_bound;  // {c0, c1}

  double eval(const Point& x, double t) const {
    double s = 0.0;
    for (const auto& m : modes) s += m.time_factor(t) * m.space_factor(x);
    return s;
  }
  bool has_delta_bound() const { return delta_bound.has_value(); }
  double c_f(double t) const { return delta_bound ? (*delta_bound)[0] + (*delta_bound)[1] * t : INFINITY; }
  /// ∫_0^T c_f(t) dt.
  double c_f_integral(double T) const {
    return delta_bound ? (*delta_bound)[0] * T + 0.5 * (*delta_bound)[1] * T * T : INFINITY;
  }
  /// sup_{0≤t≤T} c_f(t).
  double c_f_sup(double T) const { return std::max(c_f(0.0), c_f(T)); }
};

/// Outcome of probing declared metadata on a concrete box.
struct DatumChecks {
  bool lipschitz = false;
  std::optional<double> lipschitz_constant;
  bool delta_bound = false;
  // ∂_ν ≥ 0 on every face (for u_T: the reflected extension adds no positive Laplacian).
  bool normal_nonneg = false;
  bool neumann_compatible = false;
};

inline constexpr int kProbePoints = 1024;
inline constexpr double kProbeTolerance = 1e-8;

namespace detail {

inline std::vector<Point> probe_points(const Grid& g) {
  std::vector<Point> pts;
  if (g.dim() == 1) {
    for (int i = 0; i < kProbePoints; ++i)
      pts.push_back({g.lower(0) + (i + 0.5) * (g.upper(0) - g.lower(0)) / kProbePoints, 0.0});
  } else {
    const int m = 32;  // 32 × 32 = kProbePoints
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i)
        pts.push_back({g.lower(0) + (i + 0.5) * (g.upper(0) - g.lower(0)) / m,
                       g.lower(1) + (j + 0.5) * (g.upper(1) - g.lower(1)) / m});
  }
  return pts;
}

// Face points paired with outward normals.
inline std::vector<std::pair<Point, Point>> face_points(const Grid& g) {
  std::vector<std::pair<Point, Point>> out;
  if (g.dim() == 1) {
    out.push_back({{g.lower(0), 0.0}, {-1.0, 0.0}});
    out.push_back({{g.upper(0), 0.0}, {1.0, 0.0}});
    return out;
  }
  const int m = 32;
  for (int k = 0; k < m; ++k) {
    const double x = g.lower(0) + (k + 0.5) * (g.upper(0) - g.lower(0)) / m;
    const double y = g.lower(1) + (k + 0.5) * (g.upper(1) - g.lower(1)) / m;
    out.push_back({{g.lower(0), y}, {-1.0, 0.0}});
    out.push_back({{g.upper(0), y}, {1.0, 0.0}});
    out.push_back({{x, g.lower(1)}, {0.0, -1.0}});
    out.push_back({{x, g.upper(1)}, {0.0, 1.0}});
  }
  return out;
}

inline double param(const Params& given, const Params& defaults, const std::string& key) {
  auto it = given.find(key);
  return it != given.end() ? it->second : defaults.at(key);
}

inline Params merge_params(const std::string& entry, const Params& defaults, const Params& given) {
  for (const auto& [k, v] : given) {
    if (!defaults.contains(k)) throw CatalogError("entry '" + entry + "' has no parameter '" + k + "'");
    if (!std::isfinite(v)) throw CatalogError("parameter '" + k + "' must be finite");
  }
  Params merged = defaults;
  for (const auto& [k, v] : given) merged[k] = v;
  return merged;
}

struct Profile {
  std::function<double(double)> f, df, d2f;  // d2f empty if singular
};

// Tensorized datum u(x) = Σ_a φ(x_a).
inline void tensorize(TerminalDatum& d, const Profile& p) {
  const int dim = d.dim;
  d.value = [p, dim](const Point& x) {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += p.f(x[a]);
    return s;
  };
  d.gradient = [p, dim](const Point& x) {
    Point g{0.0, 0.0};
    for (int a = 0; a < dim; ++a) g[a] = p.df(x[a]);
    return g;
  };
  if (p.d2f)
    d.laplacian = [p, dim](const Point& x) {
      double s = 0.0;
      for (int a = 0; a < dim; ++a) s += p.d2f(x[a]);
      return s;
    };
}

// max over the box of |x_a − c| for every axis.
inline double farthest(const Grid& g, double c) {
  double m = 0.0;
  for (int a = 0; a < g.dim(); ++a) m = std::max({m, std::abs(g.lower(a) - c), std::abs(g.upper(a) - c)});
  return m;
}

}  // namespace detail

/// Closed catalog of named terminal data and sources.
class Catalog {
 public:
  static std::vector<std::string> terminal_names() {
    return {"constant", "affine", "kink", "tent", "concave_bump", "half_square", "cosine", "radial_bump"};
  }
  static std::vector<std::string> source_names() { return {"zero", "constant", "cos_source"}; }

  static Params terminal_defaults(const std::string& name) {
    static const std::map<std::string, Params> table{
        {"constant", {{"value", 5.0}}},
        {"affine", {{"slope", 1.0}}},
        {"kink", {{"center", 0.5}}},
        {"tent", {{"center", 0.5}}},
        {"concave_bump", {{"center", 0.5}}},
        {"half_square", {}},
        {"cosine", {{"amplitude", 1.0}, {"frequency", 1.0}}},
        {"radial_bump", {{"amplitude", 1.0}, {"width", 0.25}, {"cx", 0.5}, {"cy", 0.5}}},
    };
    auto it = table.find(name);
    if (it == table.end()) throw CatalogError("unknown terminal datum '" + name + "'; available: " + join(terminal_names()));
    return it->second;
  }

  static Params source_defaults(const std::string& name) {
    static const std::map<std::string, Params> table{
        {"zero", {}}, {"constant", {{"value", 1.0}}}, {"cos_source", {{"amplitude", 1.0}}}};
    auto it = table.find(name);
    if (it == table.end()) throw CatalogError("unknown source '" + name + "'; available: " + join(source_names()));
    return it->second;
  }

  static TerminalDatum terminal(const std::string& name, int dim, const Params& given = {}) {
    if (dim != 1 && dim != 2) throw CatalogError("arity must be 1 or 2");
    const Params p = detail::merge_params(name, terminal_defaults(name), given);
    TerminalDatum d;
    d.name = name;
    d.params = p;
    d.dim = dim;
    const double rd = std::sqrt(static_cast<double>(dim));
    using detail::Profile;
    constexpr double pi = std::numbers::pi;

    if (name == "constant") {
      const double v = p.at("value") / dim;
      detail::tensorize(d, Profile{[v](double) { return v; }, [](double) { return 0.0; }, [](double) { return 0.0; }});
      d.lipschitz = [](const Grid&) { return std::optional<double>(0.0); };
      d.delta_plus_bound = 0.0;
    } else if (name == "affine") {
      const double s = p.at("slope");
      detail::tensorize(d, Profile{[s](double x) { return s * x; }, [s](double) { return s; }, [](double) { return 0.0; }});
      d.lipschitz = [s, rd](const Grid&) { return std::optional<double>(std::abs(s) * rd); };
      d.delta_plus_bound = 0.0;
    } else if (name == "kink" || name == "tent") {
      const double c = p.at("center");
      const double sg = name == "kink" ? 1.0 : -1.0;
      const double off = name == "kink" ? 0.0 : 0.5;
      detail::tensorize(d, Profile{[=](double x) { return off / dim + sg * std::abs(x - c); },
                                   [=](double x) { return x > c ? sg : (x < c ? -sg : 0.0); },
                                   name == "tent" ? std::function<double(double)>([](double) { return 0.0; })
                                                  : std::function<double(double)>()});
      d.lipschitz = [rd](const Grid&) { return std::optional<double>(rd); };
      if (name == "tent") d.delta_plus_bound = 0.0;
    } else if (name == "concave_bump") {
      const double c = p.at("center");
      detail::tensorize(d, Profile{[c](double x) { return -(x - c) * (x - c); },
                                   [c](double x) { return -2.0 * (x - c); }, [](double) { return -2.0; }});
      d.lipschitz = [c, rd](const Grid& g) { return std::optional<double>(2.0 * detail::farthest(g, c) * rd); };
      d.delta_plus_bound = 0.0;
    } else if (name == "half_square") {
      detail::tensorize(d, Profile{[](double x) { return 0.5 * x * x; }, [](double x) { return x; },
                                   [](double) { return 1.0; }});
      d.lipschitz = [rd](const Grid& g) { return std::optional<double>(detail::farthest(g, 0.0) * rd); };
      d.delta_plus_bound = static_cast<double>(dim);
    } else if (name == "cosine") {
      const double A = p.at("amplitude"), k = p.at("frequency");
      const double w = k * pi;
      detail::tensorize(d, Profile{[=](double x) { return A * std::cos(w * x); },
                                   [=](double x) { return -A * w * std::sin(w * x); },
                                   [=](double x) { return -A * w * w * std::cos(w * x); }});
      d.lipschitz = [=](const Grid&) { return std::optional<double>(std::abs(A) * std::abs(w) * rd); };
      d.delta_plus_bound = std::abs(A) * w * w * dim;
    } else if (name == "radial_bump") {
      if (dim != 2) throw CatalogError("entry 'radial_bump' is two-dimensional; grid has dimension " + std::to_string(dim));
      const double A = p.at("amplitude"), w = p.at("width"), cx = p.at("cx"), cy = p.at("cy");
      if (!(w > 0.0)) throw CatalogError("radial_bump width must be positive");
      const double w2 = w * w;
      d.value = [=](const Point& x) {
        const double r2 = (x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy);
        return A * std::exp(-r2 / w2);
      };
      d.gradient = [=](const Point& x) {
        const double r2 = (x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy);
        const double e = -2.0 * A * std::exp(-r2 / w2) / w2;
        return Point{e * (x[0] - cx), e * (x[1] - cy)};
      };
      d.laplacian = [=](const Point& x) {
        const double r2 = (x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy);
        return A * std::exp(-r2 / w2) * (4.0 * r2 / (w2 * w2) - 4.0 / w2);
      };
      d.lipschitz = [=](const Grid&) { return std::optional<double>(std::abs(A) * std::sqrt(2.0) * std::exp(-0.5) / w); };
      // Δ = A e^{-q}(4q − 4)/w² with q = r²/w².
      d.delta_plus_bound = A >= 0.0 ? 4.0 * A * std::exp(-2.0) / w2 : 4.0 * std::abs(A) / w2;
    }
    return d;
  }

  static SourceTerm source(const std::string& name, int dim, const Params& given = {}) {
    if (dim != 1 && dim != 2) throw CatalogError("arity must be 1 or 2");
    const Params p = detail::merge_params(name, source_defaults(name), given);
    SourceTerm s;
    s.name = name;
    s.params = p;
    s.dim = dim;
    constexpr double pi = std::numbers::pi;
    if (name == "zero") {
      s.gradient = [](const Point&, double) { return Point{0.0, 0.0}; };
      s.laplacian = [](const Point&, double) { return 0.0; };
      s.delta_bound = std::array<double, 2>{0.0, 0.0};
    } else if (name == "constant") {
      const double v = p.at("value");
      s.modes.push_back({[](double) { return 1.0; }, [v](const Point&) { return v; }});
      s.gradient = [](const Point&, double) { return Point{0.0, 0.0}; };
      s.laplacian = [](const Point&, double) { return 0.0; };
      s.delta_bound = std::array<double, 2>{0.0, 0.0};
    } else if (name == "cos_source") {
      // f = −A t Σ_a cos(π x_a):  Δf = A π² t Σ_a cos(π x_a) ≤ dim |A| π² t.
      const double A = p.at("amplitude");
      s.modes.push_back({[A](double t) { return -A * t; }, [dim](const Point& x) {
                           double v = 0.0;
                           for (int a = 0; a < dim; ++a) v += std::cos(pi * x[a]);
                           return v;
                         }});
      s.gradient = [A, dim](const Point& x, double t) {
        Point g{0.0, 0.0};
        for (int a = 0; a < dim; ++a) g[a] = A * t * pi * std::sin(pi * x[a]);
        return g;
      };
      s.laplacian = [A, dim](const Point& x, double t) {
        double v = 0.0;
        for (int a = 0; a < dim; ++a) v += std::cos(pi * x[a]);
        return A * t * pi * pi * v;
      };
      s.delta_bound = std::array<double, 2>{0.0, dim * std::abs(A) * pi * pi};
    }
    return s;
  }

  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
    return out;
  }
};

/// Probe the declared metadata of u_T on the box of g. A declared property
/// that fails the probe is a catalog defect and raises CatalogError.
inline DatumChecks verify_terminal(const TerminalDatum& d, const Grid& g) {
  if (d.dim != g.dim()) throw CatalogError("datum '" + d.name + "' has arity " + std::to_string(d.dim) +
                                           " but the grid has dimension " + std::to_string(g.dim()));
  DatumChecks out;
  const auto pts = detail::probe_points(g);
  out.lipschitz_constant = d.lipschitz ? d.lipschitz(g) : std::nullopt;
  if (out.lipschitz_constant) {
    for (const auto& x : pts) {
      const Point gr = d.gradient(x);
      if (std::hypot(gr[0], gr[1]) > *out.lipschitz_constant + kProbeTolerance)
        throw CatalogError("declared Lipschitz constant of '" + d.name + "' fails on the probe grid");
    }
    out.lipschitz = true;
  }
  if (d.delta_plus_bound) {
    if (!d.laplacian) throw CatalogError("datum '" + d.name + "' declares M_0 without a Laplacian");
    for (const auto& x : pts)
      if (std::max(0.0, d.laplacian(x)) > *d.delta_plus_bound + kProbeTolerance)
        throw CatalogError("declared M_0 of '" + d.name + "' fails on the probe grid");
    out.delta_bound = true;
  }
  out.normal_nonneg = true;
  out.neumann_compatible = true;
  for (const auto& [x, nu] : detail::face_points(g)) {
    const Point gr = d.gradient(x);
    const double dn = gr[0] * nu[0] + gr[1] * nu[1];
    if (dn < -kProbeTolerance) out.normal_nonneg = false;
    if (std::abs(dn) > kProbeTolerance) out.neumann_compatible = false;
  }
  return out;
}

/// Same for a source; c_f is probed at a handful of times in [0, horizon].
inline DatumChecks verify_source(const SourceTerm& s, const Grid& g, double horizon) {
  if (s.dim != g.dim()) throw CatalogError("source '" + s.name + "' arity does not match the grid");
  DatumChecks out;
  const auto pts = detail::probe_points(g);
  const std::array<double, 5> times{0.0, 0.25 * horizon, 0.5 * horizon, 0.75 * horizon, horizon};
  if (s.delta_bound) {
    for (double t : times)
      for (const auto& x : pts)
        if (s.laplacian(x, t) > s.c_f(t) + kProbeTolerance)
          throw CatalogError("declared c_f of source '" + s.name + "' fails on the probe grid");
    out.delta_bound = true;
  }
  out.normal_nonneg = true;
  out.neumann_compatible = true;
  if (s.gradient) {
    for (double t : times)
      for (const auto& [x, nu] : detail::face_points(g)) {
        const Point gr = s.gradient(x, t);
        const double dn = gr[0] * nu[0] + gr[1] * nu[1];
        if (dn < -kProbeTolerance) out.normal_nonneg = false;
        if (std::abs(dn) > kProbeTolerance) out.neumann_compatible = false;
      }
  } else {
    out.normal_nonneg = out.neumann_compatible = false;
  }
  return out;
}

inline ScalarField resolve(const TerminalDatum& d, const Grid& g) {
  if (d.dim != g.dim()) throw CatalogError("arity mismatch for '" + d.name + "'");
  return sample(g, d.value);
}

/// Name-based lookup: catalog entry sampled on the grid.
inline ScalarField resolve(const std::string& name, const Grid& g, const Params& params = {}) {
  const TerminalDatum d = Catalog::terminal(name, g.dim(), params);
  verify_terminal(d, g);
  return resolve(d, g);
}

inline ScalarField resolve(const SourceTerm& s, const Grid& g, double t) {
  if (s.dim != g.dim()) throw CatalogError("arity mismatch for source '" + s.name + "'");
  ScalarField out = sample(g, [&](const Point& x) { return s.eval(x, t); });
  out.time = t;
  return out;
}

}  // namespace hjlab
