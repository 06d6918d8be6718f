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

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "compass/correlations.hpp"
#include "compass/errors.hpp"
#include "compass/solver.hpp"

namespace compass {

enum class Direction { alpha, h };

inline const char* to_string(Direction d) { return d == Direction::alpha ? "alpha" : "h"; }

namespace detail {

inline ModelParams shifted(ModelParams p, Direction dir, double delta) {
  if (dir == Direction::alpha)
    p.alpha += delta;
  else
    p.h += delta;
  return p;
}

}  // namespace detail

struct FidelityResult {
  double value = 0.0;
  bool degenerate = false;  // a degenerate ground block at either endpoint
};

/// Ground-state overlap |<psi0(x)|psi0(x+delta)>| as the product of per-block
/// absolute overlaps. Degenerate blocks use the field-branch-resolved
/// eigenvector and flag the result instead of failing.
inline FidelityResult fidelity(const ModelParams& params, Direction dir, double delta) {
  if (params.bc != Boundary::ABC) throw config_error("fidelity: requires ABC");
  const GroundState a = ground_state(params);
  const GroundState b = ground_state(detail::shifted(params, dir, delta));
  double f = 1.0;
  for (std::size_t i = 0; i < a.blocks.size(); ++i)
    f *= std::abs((a.blocks[i].amplitudes.adjoint() * b.blocks[i].amplitudes)(0, 0));
  return {std::clamp(f, 0.0, 1.0), a.any_degenerate() || b.any_degenerate()};
}

/// chi_F = -2 ln F / delta^2 with the forward-step convention.
inline FidelityResult fidelity_susceptibility(const ModelParams& params, Direction dir,
                                              double delta) {
  if (!(delta > 0.0)) throw config_error("fidelity_susceptibility: delta must be positive");
  const FidelityResult f = fidelity(params, dir, delta);
  return {std::max(0.0, -2.0 * std::log(f.value) / (delta * delta)), f.degenerate};
}

/// Convergence mode: least-squares Richardson extrapolation of chi_F(delta)
/// = chi_F(0) + c delta^2 over delta in {1e-3, 5e-4, 1e-4}.
inline FidelityResult fidelity_susceptibility_extrapolated(const ModelParams& params,
                                                           Direction dir) {
  const double deltas[3] = {1e-3, 5e-4, 1e-4};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  bool degenerate = false;
  for (double d : deltas) {
    const FidelityResult r = fidelity_susceptibility(params, dir, d);
    degenerate = degenerate || r.degenerate;
    const double x = d * d;
    sx += x;
    sy += r.value;
    sxx += x * x;
    sxy += x * r.value;
  }
  const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
  return {(sy - slope * sx) / 3.0, degenerate};
}

// ---- two-site density matrix and concurrence ----

namespace detail {

inline Eigen::Matrix2cd pauli(int a) {
  Eigen::Matrix2cd m;
  switch (a) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, cdouble(0, -1), cdouble(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

inline Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return m;
}

}  // namespace detail

/// rho_ij in the basis {uu, ud, du, dd}, assembled from the Pauli expansion.
/// Reflection and phase-flip symmetry of the real Hamiltonian leave only
/// p00, p11, p22, p33, p03, p30 nonzero.
struct TwoSiteDensityMatrix {
  Eigen::Matrix4cd rho;
  double p[4][4] = {};  // Pauli coefficients p[alpha][beta]
};

inline TwoSiteDensityMatrix two_site_density_matrix(const MajoranaCorrelationMatrix& mc,
                                                    int site_i, int site_j) {
  const TwoSiteCorrelators c = two_site_correlators(mc, site_i, site_j);
  TwoSiteDensityMatrix out;
  out.p[0][0] = 1.0;
  out.p[1][1] = c.xx;
  out.p[2][2] = c.yy;
  out.p[3][3] = c.zz;
  out.p[3][0] = c.z_i;
  out.p[0][3] = c.z_j;

  using detail::kron2;
  using detail::pauli;
  out.rho = 0.25 * (kron2(pauli(0), pauli(0)) + c.xx * kron2(pauli(1), pauli(1)) +
                    c.yy * kron2(pauli(2), pauli(2)) + c.zz * kron2(pauli(3), pauli(3)) +
                    c.z_i * kron2(pauli(3), pauli(0)) + c.z_j * kron2(pauli(0), pauli(3)));

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(out.rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9)
    throw numerical_error("two_site_density_matrix: lost positive semidefiniteness");
  return out;
}

inline TwoSiteDensityMatrix two_site_density_matrix(const GroundState& gs, int site_i,
                                                    int site_j) {
  return two_site_density_matrix(majorana_matrix(gs), site_i, site_j);
}

/// Wootters concurrence C = max(r1 - r2 - r3 - r4, 0) from the spin-flipped
/// product R = rho (y x y) rho^* (y x y).
inline double concurrence(const Eigen::Matrix4cd& rho) {
  const Eigen::Matrix4cd yy = detail::kron2(detail::pauli(2), detail::pauli(2));
  const Eigen::Matrix4cd r = rho * yy * rho.conjugate() * yy;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(r, false);
  std::array<double, 4> roots{};
  for (int i = 0; i < 4; ++i) {
    const double lambda = es.eigenvalues()(i).real();
    if (lambda < -1e-9) throw numerical_error("concurrence: negative spectrum of R");
    roots[i] = std::sqrt(std::max(0.0, lambda));
  }
  std::sort(roots.begin(), roots.end(), std::greater<>());
  return std::clamp(roots[0] - roots[1] - roots[2] - roots[3], 0.0, 1.0);
}

inline double concurrence(const TwoSiteDensityMatrix& rho) { return concurrence(rho.rho); }

// ---- block entanglement entropy ----

namespace detail {

inline double binary_entropy(double x) {
  double s = 0.0;
  if (x > 1e-14) s -= x * std::log2(x);
  if (1.0 - x > 1e-14) s -= (1.0 - x) * std::log2(1.0 - x);
  return s;
}

}  // namespace detail

/// von Neumann entropy, in bits, of the first L flat sites: restrict Gamma to
/// the block's 2L Majorana indices; the +-nu pairs of i*Gamma_L give
/// S = sum H2((1 + nu)/2).
inline double block_entropy(const MajoranaCorrelationMatrix& mc, int L) {
  const int n = mc.n_sites;
  if (L < 0 || L > n) throw config_error("block_entropy: L out of range");
  if (L == 0) return 0.0;
  Eigen::MatrixXcd ig(2 * L, 2 * L);
  for (int a = 0; a < 2 * L; ++a)
    for (int b = 0; b < 2 * L; ++b) ig(a, b) = cdouble(0.0, mc.gamma(a, b));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ig, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double nu = es.eigenvalues()(i);
    if (nu < -1.0 - 1e-9 || nu > 1.0 + 1e-9)
      throw numerical_error("block_entropy: Majorana eigenvalue outside [-1, 1]");
    nu = std::clamp(nu, -1.0, 1.0);
    s += 0.5 * detail::binary_entropy(0.5 * (1.0 + nu));
  }
  return s;
}

inline double block_entropy(const GroundState& gs, int L) {
  return block_entropy(majorana_matrix(gs), L);
}

struct EntropyCurve {
  std::vector<int> block_sizes;
  std::vector<double> entropies;  // bits
  ModelParams params;
};

inline EntropyCurve entropy_curve(const GroundState& gs, const std::vector<int>& sizes) {
  const MajoranaCorrelationMatrix mc = majorana_matrix(gs);
  EntropyCurve curve;
  curve.params = gs.params;
  curve.block_sizes = sizes;
  curve.entropies.reserve(sizes.size());
  for (int L : sizes) curve.entropies.push_back(block_entropy(mc, L));
  return curve;
}

// ---- magnetization and susceptibility ----

/// Cell-summed transverse magnetization <sigma^z_{1,n} + sigma^z_{2,n}>,
/// obtained from the momentum-block occupations.
inline double magnetization(const GroundState& gs) {
  if (gs.params.bc != Boundary::ABC) throw config_error("magnetization: requires ABC");
  double occupation = 0.0;
  for (const auto& b : gs.blocks) {
    for (int mode = 0; mode < 4; ++mode) {
      const Matrix8cd nm =
          detail::quadratic_matrix(Parity::even, detail::QuadKind::number, mode, mode);
      occupation += (b.amplitudes.adjoint() * nm * b.amplitudes)(0, 0).real();
    }
  }
  return 2.0 * (occupation - gs.params.n_cells) / gs.params.n_cells;
}

inline double magnetization(const ModelParams& params) {
  return magnetization(ground_state(params));
}

/// chi = d<sigma^z>/dh by central finite differences on the grid; one-sided
/// at the endpoints. The grid must be strictly increasing with >= 3 points.
inline std::vector<double> susceptibility(const ModelParams& params,
                                          std::span<const double> h_grid) {
  if (h_grid.size() < 3) throw config_error("susceptibility: need at least 3 grid points");
  for (std::size_t i = 1; i < h_grid.size(); ++i)
    if (!(h_grid[i] > h_grid[i - 1]))
      throw config_error("susceptibility: grid must be strictly increasing");

  std::vector<double> mag(h_grid.size());
  for (std::size_t i = 0; i < h_grid.size(); ++i) {
    ModelParams p = params;
    p.h = h_grid[i];
    mag[i] = magnetization(p);
  }
  std::vector<double> chi(h_grid.size());
  const std::size_t last = h_grid.size() - 1;
  chi[0] = (mag[1] - mag[0]) / (h_grid[1] - h_grid[0]);
  chi[last] = (mag[last] - mag[last - 1]) / (h_grid[last] - h_grid[last - 1]);
  for (std::size_t i = 1; i < last; ++i)
    chi[i] = (mag[i + 1] - mag[i - 1]) / (h_grid[i + 1] - h_grid[i - 1]);
  return chi;
}

/// Local derivative of the magnetization, used by the susceptibility-exponent
/// pipeline. The default step keeps both evaluation points outside the
/// degenerate-resolution band around h = 0, where the intra-pair response is
/// not part of the limit vector.
inline double susceptibility_at(const ModelParams& params, double h, double step = 1e-4) {
  ModelParams lo = params, hi = params;
  lo.h = h - step;
  hi.h = h + step;
  return (magnetization(hi) - magnetization(lo)) / (2.0 * step);
}

/// Exact second derivative of the closed-form transverse-Ising ground energy,
/// as the per-cell susceptibility d<sigma^z>/dh of the reference chain.
inline double ising_susceptibility_abc(double J, double h, int n_cells) {
  const int n_sites = 2 * n_cells;
  double d2e = 0.0;
  for (int j = 1; j <= n_cells - 1; j += 2) {
    const double c = std::cos(static_cast<double>(j) * std::numbers::pi / n_sites);
    const double s2 = 1.0 - c * c;
    d2e -= 4.0 * J * J * s2 / std::pow(h * h + 4.0 * J * J + 4.0 * J * h * c, 1.5);
    d2e -= 4.0 * J * J * s2 / std::pow(h * h + 4.0 * J * J - 4.0 * J * h * c, 1.5);
  }
  return 2.0 * d2e / n_cells;
}

}  // namespace compass
