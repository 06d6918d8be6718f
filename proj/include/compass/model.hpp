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

#pragma once

#include <numbers>
#include <string>
#include <vector>

#include "compass/errors.hpp"

namespace compass {

/// Boundary condition of the fermionized chain. ABC pairs with the
/// even-fermion-parity sector of the periodic spin chain, PBC with the odd one.
enum class Boundary { ABC, PBC };

inline const char* to_string(Boundary bc) { return bc == Boundary::ABC ? "ABC" : "PBC"; }

inline Boundary boundary_from_string(const std::string& s) {
  if (s == "ABC" || s == "abc") return Boundary::ABC;
  if (s == "PBC" || s == "pbc") return Boundary::PBC;
  throw config_error("unknown boundary condition: " + s);
}

/// Parameters of the two-site-cell XX-YY chain in a transverse field.
///
/// The Hamiltonian couples x components on inter-cell bonds with strength J,
/// and mixes x and y components on intra-cell bonds with strengths J*(1-beta)
/// and J*alpha*beta. beta = 1 is the compass chain with y-coupling J*alpha.
/// The field enters as -(h/2) * sum sigma^z.
struct ModelParams {
  double J = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  double h = 0.0;
  int n_cells = 0;  // number of two-site cells N'
  Boundary bc = Boundary::ABC;

  int n_sites() const { return 2 * n_cells; }

  void validate() const {
    if (n_cells < 2 || n_cells % 2 != 0)
      throw config_error("n_cells must be even and >= 2, got " + std::to_string(n_cells));
    if (!(J > 0.0)) throw config_error("J must be positive");
  }
};

/// A momentum stored as the exact rational multiple numerator/n_cells of pi,
/// converted to floating point only at evaluation time.
struct Momentum {
  int numerator = 0;
  int n_cells = 0;

  double radians() const {
    return static_cast<double>(numerator) * std::numbers::pi / n_cells;
  }
  bool operator==(const Momentum&) const = default;
};

struct MomentumGrid {
  std::vector<Momentum> points;          // strictly inside (0, pi), ascending
  std::vector<Momentum> special_points;  // PBC only: {0, pi}
};

/// Positive-momentum grid of the fermion problem.
/// ABC: j*pi/N' for odd j in [1, N'-1]. PBC: 2j*pi/N' for j in [1, N'/2-1]
/// plus the separately treated points {0, pi}.
inline MomentumGrid momentum_grid(const ModelParams& params) {
  params.validate();
  MomentumGrid grid;
  const int n = params.n_cells;
  if (params.bc == Boundary::ABC) {
    grid.points.reserve(n / 2);
    for (int j = 1; j <= n - 1; j += 2) grid.points.push_back({j, n});
  } else {
    grid.points.reserve(n / 2 - 1);
    for (int j = 1; j <= n / 2 - 1; ++j) grid.points.push_back({2 * j, n});
    grid.special_points.push_back({0, n});
    grid.special_points.push_back({n, n});
  }
  return grid;
}

}  // namespace compass
