#include <cmath>

#include <gtest/gtest.h>

#include "hjlab/catalog.hpp"

using namespace hjlab;

namespace {
Grid line(int n) { return build_grid({Interval{0.0, 1.0}}, {n}); }
Grid square(int n) { return build_grid({Interval{0.0, 1.0}, Interval{0.0, 1.0}}, {n, n}); }
}  // namespace

TEST(Catalog, EveryTerminalVerifiesInOneAndTwoDimensions) {
  for (const auto& name : Catalog::terminal_names())
    for (int dim : {1, 2}) {
      if (name == "radial_bump" && dim == 1) continue;
      const Grid g = dim == 1 ? line(32) : square(16);
      const TerminalDatum d = Catalog::terminal(name, dim);
      EXPECT_NO_THROW(verify_terminal(d, g)) << name << " " << dim;
      EXPECT_EQ(resolve(name, g).size(), g.size());
    }
}

TEST(Catalog, EverySourceVerifies) {
  for (const auto& name : Catalog::source_names())
    for (int dim : {1, 2}) {
      const Grid g = dim == 1 ? line(32) : square(16);
      EXPECT_NO_THROW(verify_source(Catalog::source(name, dim), g, 1.0)) << name;
    }
}

TEST(Catalog, HypothesisMetadata) {
  const Grid g = line(32);
  const DatumChecks kink = verify_terminal(Catalog::terminal("kink", 1), g);
  EXPECT_TRUE(kink.lipschitz);
  EXPECT_FALSE(kink.delta_bound);
  const DatumChecks cosine = verify_terminal(Catalog::terminal("cosine", 1, {{"amplitude", 0.2}}), g);
  EXPECT_TRUE(cosine.delta_bound);
  EXPECT_TRUE(cosine.neumann_compatible);
  const DatumChecks bump = verify_terminal(Catalog::terminal("concave_bump", 1), g);
  EXPECT_TRUE(bump.delta_bound);
  EXPECT_FALSE(bump.normal_nonneg);
  const DatumChecks cs = verify_source(Catalog::source("cos_source", 1), g, 2.0);
  EXPECT_TRUE(cs.delta_bound);
  EXPECT_TRUE(cs.normal_nonneg);
  EXPECT_NEAR(Catalog::source("cos_source", 1).c_f_integral(2.0), 2.0 * std::numbers::pi * std::numbers::pi, 1e-12);
}

TEST(Catalog, Values) {
  const Grid g = line(10);
  const ScalarField k = resolve("kink", g);
  EXPECT_NEAR(k[0], 0.45, 1e-15);
  EXPECT_NEAR(resolve("constant", g)[3], 5.0, 1e-15);
  const ScalarField c2 = resolve("constant", square(8));
  EXPECT_NEAR(c2[17], 5.0, 1e-15);
  const ScalarField s = resolve(Catalog::source("cos_source", 1), g, 0.5);
  EXPECT_EQ(*s.time, 0.5);
  EXPECT_NEAR(s[0], -0.5 * std::cos(std::numbers::pi * 0.05), 1e-15);
}

TEST(Catalog, Errors) {
  EXPECT_THROW(Catalog::terminal("nope", 1), CatalogError);
  EXPECT_THROW(Catalog::source("nope", 1), CatalogError);
  EXPECT_THROW(Catalog::terminal("kink", 1, {{"width", 1.0}}), CatalogError);
  EXPECT_THROW(Catalog::terminal("radial_bump", 1), CatalogError);
  EXPECT_THROW(resolve(Catalog::terminal("kink", 1), square(8)), CatalogError);
  EXPECT_THROW(verify_terminal(Catalog::terminal("kink", 2), line(8)), CatalogError);
}
