#include <gtest/gtest.h>

#include <cstring>

#include "oracle/oracle.hpp"

using heat3d::Field;
using heat3d::GridSpec;
using heat3d::SolverParams;

TEST(SerialSolve, ZeroIterationsIsInitialField) {
  GridSpec g;
  g.nx = 3;
  g.ny = 2;
  g.nz = 2;
  g.seed = 4;
  g.boundary_temp = -1.0;
  SolverParams p;
  p.iterations = 0;
  const auto f = oracle::serial_solve(g, p);
  EXPECT_EQ(f.at(0, 1, 1), -1.0);
  EXPECT_EQ(f.at(1, 1, 1), heat3d::initial_value(g, 0, 0, 0));
  EXPECT_EQ(f.at(3, 2, 2), heat3d::initial_value(g, 2, 1, 1));
}

TEST(SerialSolve, UniformFixedPoint) {
  GridSpec g;
  g.nx = g.ny = g.nz = 5;
  g.boundary_temp = g.initial_temp = 2.5;
  SolverParams p;
  p.iterations = 30;
  p.dt = heat3d::stable_dt(g, p);
  for (double v : oracle::serial_solve(g, p).values) ASSERT_EQ(v, 2.5);
}

TEST(SerialSolve, SingleCellHandArithmetic) {
  GridSpec g;
  g.nx = g.ny = g.nz = 1;
  g.initial_temp = 1.0;
  SolverParams p;
  p.iterations = 1;
  p.dt = 0.125;
  // Six cold neighbors: 1 + 0.125 * (-2 - 2 - 2) = 0.25.
  EXPECT_EQ(oracle::serial_solve(g, p).at(1, 1, 1), 0.25);
  p.iterations = 2;
  // 0.25 + 0.125 * (-1.5) = 0.0625.
  EXPECT_EQ(oracle::serial_solve(g, p).at(1, 1, 1), 0.0625);
}

TEST(SerialSolve, IsDeterministic) {
  GridSpec g;
  g.nx = 8;
  g.ny = g.nz = 8;
  g.seed = 42;
  SolverParams p;
  p.iterations = 50;
  p.dt = heat3d::stable_dt(g, p);
  const auto a = oracle::serial_solve(g, p);
  const auto b = oracle::serial_solve(g, p);
  ASSERT_EQ(a.values.size(), b.values.size());
  EXPECT_EQ(std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)), 0);
}

TEST(SerialSolve, RejectsUnstableStep) {
  GridSpec g;
  SolverParams p;
  p.dt = 1.0;
  EXPECT_THROW(oracle::serial_solve(g, p), heat3d::ConfigError);
}

TEST(Compare, IdenticalFields) {
  GridSpec g;
  g.nx = g.ny = g.nz = 3;
  const auto f = Field::for_grid(g);
  const auto c = oracle::compare(f, f);
  EXPECT_EQ(c.max_abs_diff, 0.0);
  EXPECT_EQ(c.first_diff_index, -1);
  EXPECT_TRUE(c.identical());
}

TEST(Compare, ReportsDifferenceAndFirstIndex) {
  GridSpec g;
  g.nx = g.ny = g.nz = 3;
  auto a = Field::for_grid(g);
  auto b = a;
  b.values[17] += 1e-9;
  b.values[40] += 1e-12;
  const auto c = oracle::compare(a, b);
  EXPECT_EQ(c.first_diff_index, 17);
  EXPECT_DOUBLE_EQ(c.max_abs_diff, 1e-9);
}

TEST(Compare, SignedZeroCountsAsDifferent) {
  GridSpec g;
  g.nx = g.ny = g.nz = 1;
  auto a = Field::for_grid(g);
  auto b = a;
  b.values[3] = -0.0;
  EXPECT_FALSE(oracle::compare(a, b).identical());
}

TEST(Compare, ShapeMismatchThrows) {
  GridSpec g;
  g.nx = g.ny = g.nz = 2;
  const auto a = Field::for_grid(g);
  g.nz = 3;
  EXPECT_THROW(oracle::compare(a, Field::for_grid(g)), std::invalid_argument);
}
