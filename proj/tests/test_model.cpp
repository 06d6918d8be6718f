// Copyright 2026 The compass-chain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch.hpp>
#include <numbers>

#include "compass/model.hpp"

using namespace compass;

namespace {
ModelParams params(int n_cells, Boundary bc) {
  ModelParams p;
  p.n_cells = n_cells;
  p.bc = bc;
  return p;
}
}  // namespace

TEST_CASE("ABC grid for four cells") {
  const auto grid = momentum_grid(params(4, Boundary::ABC));
  REQUIRE(grid.points.size() == 2);
  REQUIRE(grid.special_points.empty());
  CHECK(grid.points[0].radians() == Approx(std::numbers::pi / 4));
  CHECK(grid.points[1].radians() == Approx(3 * std::numbers::pi / 4));
}

TEST_CASE("PBC grid for four cells") {
  const auto grid = momentum_grid(params(4, Boundary::PBC));
  REQUIRE(grid.points.size() == 1);
  CHECK(grid.points[0].radians() == Approx(std::numbers::pi / 2));
  REQUIRE(grid.special_points.size() == 2);
  CHECK(grid.special_points[0].radians() == Approx(0.0));
  CHECK(grid.special_points[1].radians() == Approx(std::numbers::pi));
}

TEST_CASE("smallest admissible grid") {
  const auto grid = momentum_grid(params(2, Boundary::ABC));
  REQUIRE(grid.points.size() == 1);
  CHECK(grid.points[0].radians() == Approx(std::numbers::pi / 2));
}

TEST_CASE("grid rejects invalid cell counts") {
  CHECK_THROWS_AS(momentum_grid(params(3, Boundary::ABC)), config_error);
  CHECK_THROWS_AS(momentum_grid(params(0, Boundary::ABC)), config_error);
  CHECK_THROWS_AS(momentum_grid(params(-4, Boundary::PBC)), config_error);
}

TEST_CASE("grid point counts and interior placement") {
  for (int n : {2, 4, 8, 16, 64}) {
    for (Boundary bc : {Boundary::ABC, Boundary::PBC}) {
      if (bc == Boundary::PBC && n == 2) continue;
      const auto grid = momentum_grid(params(n, bc));
      const std::size_t expected =
          bc == Boundary::ABC ? std::size_t(n / 2) : std::size_t(n / 2 + 1);
      CHECK(grid.points.size() + grid.special_points.size() == expected);
      for (std::size_t i = 0; i < grid.points.size(); ++i) {
        CHECK(grid.points[i].radians() > 0.0);
        CHECK(grid.points[i].radians() < std::numbers::pi);
        if (i > 0) CHECK(grid.points[i].radians() > grid.points[i - 1].radians());
      }
    }
  }
}

TEST_CASE("momenta are exact rationals") {
  const auto grid = momentum_grid(params(6, Boundary::ABC));
  REQUIRE(grid.points.size() == 3);
  CHECK(grid.points[0].numerator == 1);
  CHECK(grid.points[1].numerator == 3);
  CHECK(grid.points[2].numerator == 5);
  CHECK(grid.points[0].n_cells == 6);
}
