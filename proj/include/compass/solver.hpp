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
#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "compass/errors.hpp"
#include "compass/model.hpp"

namespace compass {

using cdouble = std::complex<double>;
using Matrix8cd = Eigen::Matrix<cdouble, 8, 8>;
using Vector8cd = Eigen::Matrix<cdouble, 8, 1>;

enum class Parity { even, odd };

namespace detail {

// One momentum block acts on four fermion modes, indexed
//   0: a1(+p')   1: a2(+p')   2: a1(-p')   3: a2(-p')
// A basis state is an occupation bitmask over these modes; |mask> is the
// product of creation operators applied in ascending mode order.
inline constexpr std::array<std::uint8_t, 8> kEvenMasks{0, 3, 5, 6, 9, 10, 12, 15};
inline constexpr std::array<std::uint8_t, 8> kOddMasks{1, 2, 4, 7, 8, 11, 13, 14};

inline const std::array<std::uint8_t, 8>& sector_masks(Parity p) {
  return p == Parity::even ? kEvenMasks : kOddMasks;
}

inline int jw_sign_below(std::uint8_t mask, int mode) {
  const unsigned below = mask & ((1u << mode) - 1u);
  return (std::popcount(below) & 1) ? -1 : 1;
}

// a_mode |mask>, a^dagger_mode |mask>; returns false when annihilated.
inline bool apply_annihilate(std::uint8_t& mask, int mode, int& sign) {
  if (!((mask >> mode) & 1u)) return false;
  sign *= jw_sign_below(mask, mode);
  mask = static_cast<std::uint8_t>(mask & ~(1u << mode));
  return true;
}

inline bool apply_create(std::uint8_t& mask, int mode, int& sign) {
  if ((mask >> mode) & 1u) return false;
  sign *= jw_sign_below(mask, mode);
  mask = static_cast<std::uint8_t>(mask | (1u << mode));
  return true;
}

enum class QuadKind { create_create, create_annihilate, number };

// Matrix of a quadratic operator in the 8-state sector basis. Quadratic
// operators preserve parity, so the sector is closed under them.
inline Matrix8cd quadratic_matrix(Parity parity, QuadKind kind, int i, int j) {
  const auto& masks = sector_masks(parity);
  std::array<int, 16> index_of{};
  index_of.fill(-1);
  for (int c = 0; c < 8; ++c) index_of[masks[c]] = c;

  Matrix8cd m = Matrix8cd::Zero();
  for (int col = 0; col < 8; ++col) {
    std::uint8_t mask = masks[col];
    int sign = 1;
    bool alive = true;
    switch (kind) {
      case QuadKind::create_create:  // a^dag_i a^dag_j, j applied first
        alive = apply_create(mask, j, sign) && apply_create(mask, i, sign);
        break;
      case QuadKind::create_annihilate:  // a^dag_i a_j
        alive = apply_annihilate(mask, j, sign) && apply_create(mask, i, sign);
        break;
      case QuadKind::number:
        alive = ((mask >> i) & 1u) != 0;
        sign = 1;
        break;
    }
    if (!alive) continue;
    const int row = index_of[mask];
    m(row, col) += static_cast<double>(sign);
  }
  return m;
}

struct QuadTerm {
  cdouble coeff;
  QuadKind kind;
  int i;
  int j;
};

// Momentum-block terms of the fermionized chain at +-p' for inter-cell x
// coupling Je, intra-cell x coupling Jo and intra-cell y coupling Jy. Terms
// are listed in "forward" form; the Hermitian conjugate of every off-diagonal
// term is added when assembling the matrix.
inline std::vector<QuadTerm> block_terms(double Je, double Jo, double Jy, double p_prime) {
  const cdouble phase = std::exp(cdouble(0.0, -p_prime));
  const cdouble phase_c = std::conj(phase);

  std::vector<QuadTerm> t;
  t.reserve(12);
  // inter-cell x bonds
  t.push_back({-Je * phase, QuadKind::create_create, 1, 2});    // a2+(p) a1+(-p)
  t.push_back({-Je * phase_c, QuadKind::create_create, 3, 0});  // a2+(-p) a1+(p)
  t.push_back({-Je * phase, QuadKind::create_annihilate, 1, 0});
  t.push_back({-Je * phase_c, QuadKind::create_annihilate, 3, 2});
  // intra-cell x bonds
  if (Jo != 0.0) {
    t.push_back({cdouble(-Jo, 0.0), QuadKind::create_create, 0, 3});  // a1+(p) a2+(-p)
    t.push_back({cdouble(-Jo, 0.0), QuadKind::create_create, 2, 1});
    t.push_back({cdouble(-Jo, 0.0), QuadKind::create_annihilate, 0, 1});
    t.push_back({cdouble(-Jo, 0.0), QuadKind::create_annihilate, 2, 3});
  }
  // intra-cell y bonds
  if (Jy != 0.0) {
    t.push_back({cdouble(+Jy, 0.0), QuadKind::create_create, 0, 3});
    t.push_back({cdouble(+Jy, 0.0), QuadKind::create_create, 2, 1});
    t.push_back({cdouble(-Jy, 0.0), QuadKind::create_annihilate, 0, 1});
    t.push_back({cdouble(-Jy, 0.0), QuadKind::create_annihilate, 2, 3});
  }
  return t;
}

}  // namespace detail

/// One momentum block of the fermion Hamiltonian in a fixed parity sector.
struct BlockHamiltonian {
  Momentum momentum;
  Parity parity = Parity::even;
  Matrix8cd matrix;
  std::array<std::uint8_t, 8> basis_masks{};  // occupation bitmasks, ascending

  std::array<std::string, 8> basis_labels() const {
    static const char* mode_names[4] = {"a1(+p)", "a2(+p)", "a1(-p)", "a2(-p)"};
    std::array<std::string, 8> labels;
    for (int c = 0; c < 8; ++c) {
      std::string s = "{";
      for (int m = 0; m < 4; ++m) {
        if ((basis_masks[c] >> m) & 1u) {
          if (s.size() > 1) s += ",";
          s += mode_names[m];
        }
      }
      s += "}";
      labels[c] = s;
    }
    return labels;
  }
};

namespace detail {

struct BlockOperators {
  Matrix8cd w;        // block Hamiltonian at the given h
  Matrix8cd w_dh;     // exact derivative dW/dh = -(total occupation)
  Matrix8cd w_dbeta;  // exact derivative dW/dbeta
};

inline Matrix8cd assemble_block(double Je, double Jo, double Jy, double p, Parity parity) {
  Matrix8cd w = Matrix8cd::Zero();
  for (const auto& term : block_terms(Je, Jo, Jy, p)) {
    const Matrix8cd m = term.coeff * quadratic_matrix(parity, term.kind, term.i, term.j);
    w += m;
    w += m.adjoint();
  }
  return w;
}

inline BlockOperators block_operators(const ModelParams& params, Momentum k, Parity parity) {
  if (k.numerator <= 0 || k.numerator >= k.n_cells ||
      (params.bc == Boundary::PBC && k.numerator % 2 != 0))
    throw config_error("momentum outside the block grid; p'=0 and p'=pi have no 8x8 block");
  const double p = k.radians();

  BlockOperators ops;
  ops.w = assemble_block(params.J, params.J * (1.0 - params.beta),
                         params.J * params.alpha * params.beta, p, parity);
  Matrix8cd occ = Matrix8cd::Zero();
  for (int mode = 0; mode < 4; ++mode)
    occ += quadratic_matrix(parity, QuadKind::number, mode, mode);
  ops.w += -params.h * occ;
  ops.w_dh = -occ;
  ops.w_dbeta = assemble_block(0.0, -params.J, params.J * params.alpha, p, parity);
  return ops;
}

}  // namespace detail

/// Builds the 8x8 block over the modes {a1(+-p'), a2(+-p')}. The even sector
/// carries the ground-state physics with ABC; the odd sector the PBC branches.
inline BlockHamiltonian block_hamiltonian(const ModelParams& params, Momentum k,
                                          Parity parity) {
  params.validate();
  BlockHamiltonian block;
  block.momentum = k;
  block.parity = parity;
  block.matrix = detail::block_operators(params, k, parity).w;
  block.basis_masks = detail::sector_masks(parity);
  return block;
}

struct EigenSystem {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXcd vectors; // orthonormal columns, phase-fixed
};

/// Dense Hermitian eigensolve with a deterministic gauge: each eigenvector is
/// scaled so its largest-modulus component is real and positive (first such
/// component on ties).
inline EigenSystem hermitian_eigensystem(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw config_error("hermitian_eigensystem: matrix not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw numerical_error("hermitian_eigensystem: input is not Hermitian");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  if (es.info() != Eigen::Success)
    throw numerical_error("hermitian_eigensystem: eigensolver failed");

  EigenSystem out{es.eigenvalues(), es.eigenvectors()};
  for (Eigen::Index c = 0; c < out.vectors.cols(); ++c) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < out.vectors.rows(); ++r) {
      const double a = std::abs(out.vectors(r, c));
      if (a > best + 1e-15) {
        best = a;
        imax = r;
      }
    }
    const cdouble z = out.vectors(imax, c);
    if (std::abs(z) > 0) out.vectors.col(c) *= std::conj(z) / std::abs(z);
  }
  return out;
}

/// How a degenerate ground pair on the h = 0 line is resolved: as the limit
/// of the ground branch for h -> 0+, or for beta -> 1- at fixed h. Both are
/// exact ground states; they differ only inside the degenerate manifold.
enum class DegeneracyResolution { field, beta_limit };

/// Per-momentum ground data. `degenerate` marks blocks whose two lowest levels
/// coincide (the h = 0 line); there the eigenvector is fixed as the requested
/// branch limit via degenerate perturbation theory.
struct BlockGround {
  Momentum momentum;
  Vector8cd amplitudes;
  double lambda_min = 0.0;
  bool degenerate = false;
};

namespace detail {

inline Vector8cd phase_fix8(Vector8cd v) {
  Eigen::Index imax = 0;
  double best = -1.0;
  for (Eigen::Index r = 0; r < 8; ++r) {
    const double a = std::abs(v(r));
    if (a > best + 1e-15) {
      best = a;
      imax = r;
    }
  }
  const cdouble z = v(imax);
  if (std::abs(z) > 0) v *= std::conj(z) / std::abs(z);
  return v;
}

inline BlockGround resolve_block_ground(const BlockOperators& ops, Momentum k,
                                        DegeneracyResolution res) {
  const EigenSystem es = hermitian_eigensystem(ops.w);
  const double scale = std::max(1.0, es.values.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * scale;

  BlockGround g;
  g.momentum = k;
  g.lambda_min = es.values(0);
  if (es.values(1) - es.values(0) >= tol) {
    g.amplitudes = phase_fix8(es.vectors.col(0));
    return g;
  }
  g.degenerate = true;
  if (es.values(2) - es.values(0) < tol) {
    // more than two-fold: keep the deterministic lowest-index vector
    g.amplitudes = phase_fix8(es.vectors.col(0));
    return g;
  }

  // Two-fold degeneracy. Resolve the pair into branches of the perturbation
  // that the requested limit switches on: W + eps * P with eps -> 0+. First
  // order inside the pair and, when that is proportional to the identity (the
  // field direction at h = 0), second order through the non-degenerate levels.
  const Matrix8cd pert = res == DegeneracyResolution::field ? ops.w_dh : (-ops.w_dbeta).eval();
  const Eigen::Matrix<cdouble, 8, 2> v01 = es.vectors.leftCols<2>();
  const Eigen::Matrix2cd first = v01.adjoint() * pert * v01;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> s1(first);
  Eigen::Vector2cd mix;
  if (s1.eigenvalues()(1) - s1.eigenvalues()(0) > tol) {
    mix = s1.eigenvectors().col(0);
  } else {
    Eigen::Matrix2cd second = Eigen::Matrix2cd::Zero();
    for (int kk = 2; kk < 8; ++kk) {
      const Eigen::Vector2cd c = (es.vectors.col(kk).adjoint() * pert * v01).transpose();
      second += c.conjugate() * c.transpose() / (es.values(0) - es.values(kk));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> s2(second);
    mix = s2.eigenvectors().col(0);
  }
  g.amplitudes = phase_fix8(v01 * mix);
  return g;
}

}  // namespace detail

struct SpecialPointContribution {
  int branch_label = 0;  // which omega branch of the four-site spectrum won
  double energy = 0.0;
};

struct GroundState {
  ModelParams params;
  std::vector<BlockGround> blocks;  // ascending momentum
  double energy = 0.0;
  std::optional<SpecialPointContribution> special;

  bool any_degenerate() const {
    for (const auto& b : blocks)
      if (b.degenerate) return true;
    return false;
  }
};

/// The sixteen exact levels of the four-site (two-cell) chain: the first eight
/// belong to the ABC sector, labels 9-16 to the PBC sector.
inline std::array<double, 16> spectra_n4(const ModelParams& params) {
  if (params.beta != 1.0)
    throw config_error("spectra_n4: closed-form spectra require beta = 1");
  const double J = params.J, a = params.alpha, hr = params.h / params.J;
  const double sx = std::sqrt(hr * hr + 1.0 + a * a);
  const double sy = std::sqrt(1.0 + a * a);
  const double sp = std::sqrt(hr * hr + 1.0 + 2.0 * a + a * a);
  const double sm = std::sqrt(hr * hr + 1.0 - 2.0 * a + a * a);
  return {
      2.0 * J * sx,  -2.0 * J * sx,  2.0 * J * sy,  -2.0 * J * sy,
      0.0,           0.0,            0.0,           0.0,
      J * a + J + J * sm, J * a + J - J * sm, J * a - J + J * sp, J * a - J - J * sp,
      -J * a - J + J * sm, -J * a - J - J * sm, -J * a + J + J * sp, -J * a + J - J * sp};
}

namespace detail {

inline SpecialPointContribution pbc_special_minimum(const ModelParams& params) {
  const auto w = spectra_n4(params);
  SpecialPointContribution s{8, w[8]};
  for (int i = 8; i < 16; ++i) {
    if (w[i] < s.energy) {
      s.energy = w[i];
      s.branch_label = i;
    }
  }
  s.branch_label += 1;  // 1-based labels, so branches 9..16
  return s;
}

}  // namespace detail

/// Ground-state data. ABC: all momentum blocks sit in their even-sector
/// minima and E = sum lambda_min + h N'. PBC: even minima at the nonspecial
/// momenta plus the branch minimum of the {0, pi} modes.
inline GroundState ground_state(const ModelParams& params,
                                DegeneracyResolution res = DegeneracyResolution::field) {
  params.validate();
  if (params.bc == Boundary::PBC && params.beta != 1.0)
    throw config_error("ground_state: PBC special-point branches require beta = 1");

  const MomentumGrid grid = momentum_grid(params);
  GroundState gs;
  gs.params = params;
  gs.blocks.reserve(grid.points.size());
  double sum_lambda = 0.0;
  for (const Momentum& k : grid.points) {
    const auto ops = detail::block_operators(params, k, Parity::even);
    gs.blocks.push_back(detail::resolve_block_ground(ops, k, res));
    sum_lambda += gs.blocks.back().lambda_min;
  }
  if (params.bc == Boundary::ABC) {
    gs.energy = sum_lambda + params.h * params.n_cells;
  } else {
    // each nonspecial block carries a +2h share of the h N' constant
    const auto special = detail::pbc_special_minimum(params);
    gs.energy = sum_lambda + 2.0 * params.h * static_cast<double>(grid.points.size()) +
                special.energy;
    gs.special = special;
  }
  return gs;
}

struct Spectrum {
  double momentum = 0.0;
  Parity parity = Parity::even;
  std::vector<std::pair<int, double>> branches;  // (label, energy)
};

/// Closed-form spectral branches at momentum p' in [0, pi]: the two +- pairs
/// of the ABC problem, or the eight PBC combinations.
inline Spectrum spectrum_analytic(const ModelParams& params, double p_prime) {
  if (params.beta != 1.0)
    throw config_error("spectrum_analytic: closed-form spectra require beta = 1");
  if (p_prime < 0.0 || p_prime > std::numbers::pi + 1e-12)
    throw config_error("spectrum_analytic: momentum outside [0, pi]");
  const double J = params.J, a = params.alpha, hr = params.h / params.J;
  const double y = 1.0 + 2.0 * a * std::cos(p_prime) + a * a;
  const double sx = std::sqrt(hr * hr + y);
  const double sy = std::sqrt(std::max(0.0, y));

  Spectrum s;
  s.momentum = p_prime;
  if (params.bc == Boundary::ABC) {
    s.parity = Parity::even;
    s.branches = {{1, 2.0 * J * sx}, {2, -2.0 * J * sx}, {3, 2.0 * J * sy}, {4, -2.0 * J * sy}};
  } else {
    s.parity = Parity::odd;
    s.branches = {{1, -J * sx - J * sy}, {2, -J * sx - J * sy},
                  {3, -J * sx + J * sy}, {4, -J * sx + J * sy},
                  {5, J * sx - J * sy},  {6, J * sx - J * sy},
                  {7, J * sx + J * sy},  {8, J * sx + J * sy}};
  }
  return s;
}

/// Quasiparticle excitation gap: the minimum over the momentum continuum of
/// the pair-flip cost, which is attained at a zone edge. Vanishes only on the
/// zero-field line; strictly positive for h != 0.
inline double energy_gap(const ModelParams& params) {
  if (params.beta != 1.0)
    throw config_error("energy_gap: closed-form gap requires beta = 1");
  const double J = params.J, a = params.alpha, hr = params.h / params.J;
  const double plus = 2.0 * J * (std::sqrt(hr * hr + 1.0 + 2.0 * a + a * a) - std::abs(a + 1.0));
  const double minus = 2.0 * J * (std::sqrt(hr * hr + 1.0 - 2.0 * a + a * a) - std::abs(a - 1.0));
  return std::min(plus, minus);
}

/// Exact ground energy of the uniform transverse Ising chain written on the
/// same two-site cells (x couplings on every bond, field +h/2). ABC sums both
/// quasiparticle branches; PBC adds the special-point branch minimum, valid
/// for 0 < h < 2J.
inline double ising_ground_energy(double J, double h, int n_cells, Boundary bc) {
  if (n_cells < 2 || n_cells % 2 != 0)
    throw config_error("ising_ground_energy: n_cells must be even and >= 2");
  if (!(J > 0.0)) throw config_error("ising_ground_energy: J must be positive");
  const int n_sites = 2 * n_cells;
  double e = 0.0;
  if (bc == Boundary::ABC) {
    for (int j = 1; j <= n_cells - 1; j += 2) {
      const double c = std::cos(static_cast<double>(j) * std::numbers::pi / n_sites);
      e -= std::sqrt(h * h + 4.0 * J * J + 4.0 * J * h * c);
      e -= std::sqrt(h * h + 4.0 * J * J - 4.0 * J * h * c);
    }
  } else {
    if (!(h > 0.0 && h < 2.0 * J))
      throw config_error("ising_ground_energy: PBC closed form valid only for 0 < h < 2J");
    for (int j = 1; j <= n_cells / 2 - 1; ++j) {
      const double c = std::cos(static_cast<double>(j) * std::numbers::pi / n_cells);
      e -= std::sqrt(h * h + 4.0 * J * J + 4.0 * J * h * c);
      e -= std::sqrt(h * h + 4.0 * J * J - 4.0 * J * h * c);
    }
    e += -2.0 * J - std::sqrt(4.0 * J * J + h * h);
  }
  return e;
}

}  // namespace compass
