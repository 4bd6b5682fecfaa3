#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hjlab/hamiltonian.hpp"

using namespace hjlab;

namespace {
double H(const HamiltonianSpec& h, std::initializer_list<double> p) {
  return h.eval(std::span<const double>(p.begin(), p.size()));
}
Point DH(const HamiltonianSpec& h, std::initializer_list<double> p) {
  return h.grad(std::span<const double>(p.begin(), p.size()));
}
}  // namespace

TEST(Hamiltonian, Values) {
  EXPECT_DOUBLE_EQ(H(HamiltonianSpec::quadratic(), {3, 4}), 25.0);
  EXPECT_DOUBLE_EQ(H(HamiltonianSpec::power(3, 0), {2}), 8.0);
  EXPECT_DOUBLE_EQ(H(HamiltonianSpec::power(3, 1), {0}), 1.0);
  const auto t = HamiltonianSpec::tabulated({-1, 0, 2}, {1, 0, 4});
  EXPECT_DOUBLE_EQ(H(t, {1}), 2.0);
  EXPECT_DOUBLE_EQ(H(t, {3}), 6.0);    // linear extrapolation
  EXPECT_DOUBLE_EQ(H(t, {-2}), 2.0);
  EXPECT_TRUE(HamiltonianSpec::zero().is_zero());
}

TEST(Hamiltonian, Gradients) {
  const Point q = DH(HamiltonianSpec::quadratic(), {3, 4});
  EXPECT_DOUBLE_EQ(q[0], 6.0);
  EXPECT_DOUBLE_EQ(q[1], 8.0);
  EXPECT_DOUBLE_EQ(DH(HamiltonianSpec::power(3, 0), {2})[0], 12.0);
  EXPECT_EQ(DH(HamiltonianSpec::power(1.5, 0), {0})[0], 0.0);
}

TEST(Hamiltonian, RejectsBadInput) {
  const double nan = std::nan("");
  EXPECT_THROW(H(HamiltonianSpec::quadratic(), {nan}), InputError);
  EXPECT_THROW(HamiltonianSpec::power(1.0, 0), InputError);
  EXPECT_THROW(HamiltonianSpec::tabulated({0, 0}, {1, 1}), InputError);
  const double pm = 0, pp = 1, s = -1;
  EXPECT_THROW(lax_friedrichs(HamiltonianSpec::quadratic(), {&pm, 1}, {&pp, 1}, {&s, 1}), InputError);
}

TEST(Hamiltonian, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double h = 1e-5;
  for (const auto& spec : {HamiltonianSpec::quadratic(), HamiltonianSpec::power(3.0, 0.5), HamiltonianSpec::power(1.5, 0.1)}) {
    int done = 0;
    while (done < 100) {
      Point p{u(rng), u(rng)};
      if (std::hypot(p[0], p[1]) > 1.0) continue;
      ++done;
      const Point g = spec.grad(std::span<const double>(p.data(), 2));
      for (int i = 0; i < 2; ++i) {
        Point a = p, b = p;
        a[i] += h;
        b[i] -= h;
        const double fd = (spec.eval(std::span<const double>(a.data(), 2)) - spec.eval(std::span<const double>(b.data(), 2))) / (2 * h);
        EXPECT_NEAR(g[i], fd, 1e-6);
      }
    }
  }
}

TEST(Hamiltonian, QuadraticEqualsPowerTwo) {
  const auto q = HamiltonianSpec::quadratic();
  const auto p = HamiltonianSpec::power(2.0, 0.0);
  for (double a : {-2.0, -0.3, 0.0, 0.7, 5.0}) {
    const Point v{a, 1.0 - a};
    const std::span<const double> s(v.data(), 2);
    EXPECT_NEAR(q.eval(s), p.eval(s), 1e-13);
    EXPECT_NEAR(q.grad(s)[0], p.grad(s)[0], 1e-13);
    EXPECT_NEAR(q.grad(s)[1], p.grad(s)[1], 1e-13);
  }
}

TEST(LaxFriedrichs, ConsistencyAndExample) {
  const auto q = HamiltonianSpec::quadratic();
  const Point p{0.3, -1.2}, sig{5, 5};
  EXPECT_EQ(lax_friedrichs(q, {p.data(), 2}, {p.data(), 2}, {sig.data(), 2}), q.eval(std::span<const double>(p.data(), 2)));
  const double pm = 0, pp = 2, s = 4;
  EXPECT_DOUBLE_EQ(lax_friedrichs(q, {&pm, 1}, {&pp, 1}, {&s, 1}), -3.0);
}

TEST(LaxFriedrichs, MonotoneWhenSigmaDominates) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const auto spec = HamiltonianSpec::power(3.0, 0.2);
  const double d = 1e-3;
  for (int k = 0; k < 1000; ++k) {
    const double a = u(rng), b = u(rng);
    const double sigma = spec.component_bound(std::max(std::abs(a), std::abs(b)) + d);
    const double base = lax_friedrichs(spec, {&a, 1}, {&b, 1}, {&sigma, 1});
    const double b2 = b + d, a2 = a + d;
    EXPECT_LE(lax_friedrichs(spec, {&a, 1}, {&b2, 1}, {&sigma, 1}), base + 1e-12);
    EXPECT_GE(lax_friedrichs(spec, {&a2, 1}, {&b, 1}, {&sigma, 1}), base - 1e-12);
  }
}

TEST(Hamiltonian, ComponentBoundDominatesGradient) {
  const auto spec = HamiltonianSpec::power(2.5, 0.01);
  for (double r : {0.0, 0.5, 1.0, 3.0})
    for (double t = 0; t < 6.3; t += 0.3) {
      const Point p{r * std::cos(t), r * std::sin(t)};
      const Point g = spec.grad(std::span<const double>(p.data(), 2));
      EXPECT_LE(std::max(std::abs(g[0]), std::abs(g[1])), spec.component_bound(r) + 1e-12);
    }
}
