#include <string>

#include <gtest/gtest.h>

#include "hjlab/config.hpp"

using namespace hjlab;

namespace {

const char* kMinimal = R"(# heat baseline
[domain]
dim = 1
x = 0, 1

[grid]
cells = 64

[problem]
hamiltonian = zero
terminal = kink

[sweep]
experiment = heat_baseline
epsilons = 1e-2, 1e-3, 1e-4
)";

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

int line_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

}  // namespace

TEST(Config, MinimalEchoesDefaults) {
  const RunConfig c = parse_config_text(kMinimal);
  EXPECT_EQ(c.dt_policy, "auto");
  EXPECT_EQ(c.dt, 0.0);
  EXPECT_EQ(c.beta, 0.75);
  EXPECT_EQ(c.alpha, 1.5);
  EXPECT_EQ(c.refinement, 8);
  EXPECT_EQ(c.experiment, ExperimentKind::heat_baseline);
  EXPECT_EQ(c.epsilons, (std::vector<double>{1e-2, 1e-3, 1e-4}));
  EXPECT_EQ(c.formats, (std::vector<std::string>{"csv", "json"}));
  EXPECT_EQ(c.out_dir, ".");
  const SweepPlan p = make_plan(c);
  EXPECT_EQ(p.problem.grid.cells(0), 64);
  EXPECT_TRUE(p.problem.hamiltonian.is_zero());
}

TEST(Config, FullSyntax) {
  const RunConfig c = parse_config_text(R"([domain]
dim = 2
x = 0, 2
y = -1, 1   ; trailing comment
[grid]
cells = 16
dt = 0.001
snapshots = 17
[problem]
horizon = 0.5
hamiltonian = power
gamma = 3
terminal = radial_bump
terminal.width = 0.3
source = cos_source
source.amplitude = 0.5
[sweep]
experiment = two_sided
epsilons = 0.1, 0.05, 0.02
x0 = 1, 0
tau = 0.1
threads = 2
doubling_check = yes
[output]
dir = /tmp
name = run1
formats = json
)");
  EXPECT_EQ(c.cells, (std::vector<int>{16, 16}));
  EXPECT_EQ(c.box[1], (Interval{-1, 1}));
  EXPECT_EQ(c.dt, 0.001);
  EXPECT_EQ(c.terminal_params.at("width"), 0.3);
  EXPECT_EQ(c.source_params.at("amplitude"), 0.5);
  EXPECT_EQ((*c.x0)[0], 1.0);
  EXPECT_TRUE(c.doubling_check);
  EXPECT_EQ(c.threads, 2u);
  EXPECT_EQ(c.formats, (std::vector<std::string>{"json"}));
  EXPECT_EQ(make_hamiltonian(c).gamma(), 3.0);
}

TEST(Config, ValidationMessages) {
  EXPECT_EQ(error_of(replace(kMinimal, "1e-2, 1e-3, 1e-4", "1e-4, 1e-3, 1e-2")),
            "sweep.epsilons: epsilons must be strictly decreasing");
  const std::string h = error_of(replace(kMinimal, "hamiltonian = zero", "hamiltonian = cubic"));
  EXPECT_NE(h.find("problem.hamiltonian"), std::string::npos);
  EXPECT_NE(h.find("available: quadratic, power, zero, tabulated"), std::string::npos);
  EXPECT_NE(error_of(replace(kMinimal, "terminal = kink", "terminal = spike")).find("available:"), std::string::npos);
  EXPECT_NE(error_of(replace(kMinimal, "cells = 64", "cells = 4")).find("grid.cells"), std::string::npos);
  EXPECT_NE(error_of(replace(kMinimal, "x = 0, 1", "x = 1, 0")).find("domain"), std::string::npos);
  EXPECT_NE(error_of(replace(kMinimal, "hamiltonian = zero", "hamiltonian = quadratic")).find("zero Hamiltonian"),
            std::string::npos);
  EXPECT_NE(error_of(std::string(kMinimal) + "[output]\nformats = csv, xml\n").find("output.formats"), std::string::npos);
  EXPECT_NE(error_of(replace(kMinimal, "experiment = heat_baseline", "experiment = sideways")).find("two_sided"),
            std::string::npos);
}

TEST(Config, ParseErrorsCarryLineNumbers) {
  EXPECT_EQ(line_of(replace(kMinimal, "cells = 64", "cellz = 64")), 7);
  EXPECT_NE(error_of(replace(kMinimal, "cells = 64", "cellz = 64")).find("grid.cellz: unknown key"), std::string::npos);
  EXPECT_EQ(line_of(replace(kMinimal, "[grid]", "[mesh]")), 6);
  EXPECT_EQ(line_of(replace(kMinimal, "cells = 64", "cells 64")), 7);
  EXPECT_EQ(line_of(replace(kMinimal, "cells = 64", "cells = 64\ncells = 32")), 8);
  EXPECT_EQ(line_of(replace(kMinimal, "cells = 64", "cells = sixty")), 7);
  EXPECT_EQ(line_of(replace(kMinimal, "cells = 64", "cells = 64.5")), 7);
  EXPECT_EQ(line_of("dim = 1\n"), 1);
  EXPECT_EQ(line_of(replace(kMinimal, "x = 0, 1", "x = 0")), 4);
}

TEST(Config, MissingFileIsIoError) {
  EXPECT_THROW(parse_config("/nonexistent/config.ini"), IoError);
}
