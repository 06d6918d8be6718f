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
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "compass/errors.hpp"
#include "compass/model.hpp"

namespace compass {

// Brute-force diagonalization of the spin chain in the full 2^N product basis.
// Site (s, n) maps to flat index m = 2(n-1)+s and to bit m-1; bit value 1 is
// spin up. The spin boundary is always periodic; fermion boundary conditions
// live in the sigma^z parity sectors (even parity <-> ABC, odd <-> PBC).

enum class Sector { full, even, odd };

/// Bond and field coefficients of H = c_e sum x.x (inter-cell)
/// + c_o sum x.x (intra-cell) + c_y sum y.y (intra-cell) + c_z sum sigma^z.
struct SpinChainCouplings {
  double even_xx = 0.0;
  double odd_xx = 0.0;
  double odd_yy = 0.0;
  double field_z = 0.0;

  static SpinChainCouplings compass(const ModelParams& p) {
    return {-p.J, -p.J * (1.0 - p.beta), -p.J * p.alpha * p.beta, -p.h / 2.0};
  }
  static SpinChainCouplings transverse_ising(double J, double h) {
    return {-J, -J, 0.0, +h / 2.0};
  }
};

inline constexpr int kMaxEDSites = 16;

struct SpinHamiltonian {
  int n_sites = 0;
  SpinChainCouplings c;

  SpinHamiltonian(int sites, const SpinChainCouplings& couplings)
      : n_sites(sites), c(couplings) {
    if (sites < 4 || sites % 2 != 0) throw config_error("SpinHamiltonian: need an even N >= 4");
    if (sites > kMaxEDSites)
      throw size_limit_error("SpinHamiltonian: N = " + std::to_string(sites) +
                             " exceeds the brute-force limit of 16 sites");
  }

  std::size_t dimension() const { return std::size_t{1} << n_sites; }

  // y += H x over the full basis. Matrix elements are real in this basis.
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    const int n = n_sites;
    const int cells = n / 2;
    const std::size_t dim = dimension();
    y.setZero(dim);
    for (std::size_t mask = 0; mask < dim; ++mask) {
      const double amp = x(static_cast<Eigen::Index>(mask));
      if (amp == 0.0) continue;
      double diag = 0.0;
      for (int b = 0; b < n; ++b) diag += ((mask >> b) & 1u) ? c.field_z : -c.field_z;
      y(static_cast<Eigen::Index>(mask)) += diag * amp;
      for (int cell = 0; cell < cells; ++cell) {
        const int i_even = 2 * cell + 1;            // site (2, n)
        const int j_even = (2 * cell + 2) % n;      // site (1, n+1), wraps
        const int i_odd = 2 * cell;                 // site (1, n)
        const int j_odd = 2 * cell + 1;             // site (2, n)
        if (c.even_xx != 0.0) {
          const std::size_t flipped = mask ^ ((std::size_t{1} << i_even) | (std::size_t{1} << j_even));
          y(static_cast<Eigen::Index>(flipped)) += c.even_xx * amp;
        }
        if (c.odd_xx != 0.0) {
          const std::size_t flipped = mask ^ ((std::size_t{1} << i_odd) | (std::size_t{1} << j_odd));
          y(static_cast<Eigen::Index>(flipped)) += c.odd_xx * amp;
        }
        if (c.odd_yy != 0.0) {
          const std::size_t flipped = mask ^ ((std::size_t{1} << i_odd) | (std::size_t{1} << j_odd));
          const bool equal = ((mask >> i_odd) & 1u) == ((mask >> j_odd) & 1u);
          y(static_cast<Eigen::Index>(flipped)) += (equal ? -c.odd_yy : c.odd_yy) * amp;
        }
      }
    }
  }

  std::vector<std::uint32_t> sector_basis(Sector sector) const {
    std::vector<std::uint32_t> basis;
    const std::size_t dim = dimension();
    basis.reserve(sector == Sector::full ? dim : dim / 2);
    for (std::size_t mask = 0; mask < dim; ++mask) {
      const int pop = std::popcount(mask);
      if (sector == Sector::full || (sector == Sector::even) == (pop % 2 == 0))
        basis.push_back(static_cast<std::uint32_t>(mask));
    }
    return basis;
  }

  Eigen::MatrixXd dense(const std::vector<std::uint32_t>& basis) const {
    std::vector<std::int32_t> pos(dimension(), -1);
    for (std::size_t i = 0; i < basis.size(); ++i) pos[basis[i]] = static_cast<std::int32_t>(i);
    const Eigen::Index d = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(dimension());
    Eigen::VectorXd col(dimension());
    for (Eigen::Index j = 0; j < d; ++j) {
      unit(basis[j]) = 1.0;
      apply(unit, col);
      unit(basis[j]) = 0.0;
      for (std::size_t mask = 0; mask < dimension(); ++mask) {
        if (col(static_cast<Eigen::Index>(mask)) != 0.0) {
          const auto i = pos[mask];
          if (i >= 0) m(i, j) = col(static_cast<Eigen::Index>(mask));
        }
      }
    }
    return m;
  }
};

struct EDGroundState {
  double energy = 0.0;
  Eigen::VectorXd vector;  // full 2^N amplitudes, sector-embedded
  int parity = 0;          // eigenvalue of prod sigma^z
  int n_sites = 0;
};

namespace detail {

// Lanczos with full reorthogonalization for the k lowest eigenpairs of the
// sector-restricted operator. Deterministic start vector.
inline void lanczos_lowest(const SpinHamiltonian& ham,
                           const std::vector<std::uint32_t>& basis, int want,
                           std::vector<double>& values,
                           std::vector<Eigen::VectorXd>& vectors) {
  const std::size_t dim_full = ham.dimension();
  const Eigen::Index d = static_cast<Eigen::Index>(basis.size());
  const int max_iter = static_cast<int>(std::min<Eigen::Index>(d, 350));

  std::mt19937 rng(12345u);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = uni(rng);
  v.normalize();

  std::vector<Eigen::VectorXd> lanczos_basis;
  std::vector<double> alpha, beta;
  Eigen::VectorXd full(dim_full), hfull(dim_full), w(d);

  auto apply_sector = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    full.setZero();
    for (Eigen::Index i = 0; i < d; ++i) full(basis[i]) = in(i);
    ham.apply(full, hfull);
    out.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) out(i) = hfull(basis[i]);
  };

  Eigen::MatrixXd tri_vecs;
  Eigen::VectorXd tri_vals;
  for (int it = 0; it < max_iter; ++it) {
    lanczos_basis.push_back(v);
    apply_sector(v, w);
    if (it > 0) w -= beta.back() * lanczos_basis[it - 1];
    alpha.push_back(v.dot(w));
    w -= alpha.back() * v;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : lanczos_basis) w -= q.dot(w) * q;
    const double b = w.norm();

    const int m = static_cast<int>(alpha.size());
    if (m >= want + 1 || b < 1e-13) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      tri_vals = es.eigenvalues();
      tri_vecs = es.eigenvectors();
      bool converged = m >= want;
      for (int i = 0; i < want && converged; ++i)
        if (std::abs(b * tri_vecs(m - 1, i)) > 1e-11 * std::max(1.0, std::abs(tri_vals(i))))
          converged = false;
      if (converged || b < 1e-13 || m == max_iter) {
        values.assign(tri_vals.data(), tri_vals.data() + want);
        vectors.clear();
        for (int i = 0; i < want; ++i) {
          Eigen::VectorXd ritz = Eigen::VectorXd::Zero(d);
          for (int q = 0; q < m; ++q) ritz += tri_vecs(q, i) * lanczos_basis[q];
          ritz.normalize();
          vectors.push_back(std::move(ritz));
        }
        return;
      }
    }
    beta.push_back(b);
    v = w / b;
  }
  throw numerical_error("lanczos_lowest: no convergence");
}

inline void sector_lowest(const SpinHamiltonian& ham, const std::vector<std::uint32_t>& basis,
                          int want, std::vector<double>& values,
                          std::vector<Eigen::VectorXd>& vectors) {
  if (basis.size() <= 1024) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ham.dense(basis));
    values.clear();
    vectors.clear();
    for (int i = 0; i < want; ++i) {
      values.push_back(es.eigenvalues()(i));
      vectors.emplace_back(es.eigenvectors().col(i));
    }
  } else {
    lanczos_lowest(ham, basis, want, values, vectors);
  }
}

inline EDGroundState package_ground(const SpinHamiltonian& ham,
                                    const std::vector<std::uint32_t>& basis, double energy,
                                    const Eigen::VectorXd& sector_vec) {
  EDGroundState g;
  g.energy = energy;
  g.n_sites = ham.n_sites;
  g.vector = Eigen::VectorXd::Zero(ham.dimension());
  for (std::size_t i = 0; i < basis.size(); ++i) g.vector(basis[i]) = sector_vec(static_cast<Eigen::Index>(i));
  // sign fixed by the first nonzero amplitude
  for (Eigen::Index i = 0; i < g.vector.size(); ++i) {
    if (std::abs(g.vector(i)) > 1e-12) {
      if (g.vector(i) < 0) g.vector = -g.vector;
      break;
    }
  }
  int pop = -1;
  double best = 0.0;
  for (Eigen::Index i = 0; i < g.vector.size(); ++i) {
    if (std::abs(g.vector(i)) > best) {
      best = std::abs(g.vector(i));
      pop = std::popcount(static_cast<std::uint32_t>(i));
    }
  }
  g.parity = (pop % 2 == 0) ? 1 : -1;

  // residual check against the invariant ||Hv - Ev|| < 1e-9
  Eigen::VectorXd hv(ham.dimension());
  ham.apply(g.vector, hv);
  if ((hv - g.energy * g.vector).norm() > 1e-9 * std::max(1.0, std::abs(g.energy)))
    throw numerical_error("ed ground state failed the residual check");
  return g;
}

}  // namespace detail

inline EDGroundState ed_ground_state_for(const SpinHamiltonian& ham, Sector sector) {
  if (sector == Sector::full) {
    EDGroundState even = ed_ground_state_for(ham, Sector::even);
    EDGroundState odd = ed_ground_state_for(ham, Sector::odd);
    return even.energy <= odd.energy ? even : odd;
  }
  const auto basis = ham.sector_basis(sector);
  std::vector<double> values;
  std::vector<Eigen::VectorXd> vectors;
  detail::sector_lowest(ham, basis, 1, values, vectors);
  return detail::package_ground(ham, basis, values[0], vectors[0]);
}

inline EDGroundState ed_ground_state(const ModelParams& params, Sector sector) {
  params.validate();
  SpinHamiltonian ham(params.n_sites(), SpinChainCouplings::compass(params));
  return ed_ground_state_for(ham, sector);
}

inline EDGroundState ed_ising_ground_state(double J, double h, int n_cells, Sector sector) {
  SpinHamiltonian ham(2 * n_cells, SpinChainCouplings::transverse_ising(J, h));
  return ed_ground_state_for(ham, sector);
}

/// k lowest levels of one parity sector (dense below dimension 1025,
/// Lanczos above).
inline std::vector<double> ed_low_spectrum(const ModelParams& params, Sector sector, int k) {
  params.validate();
  SpinHamiltonian ham(params.n_sites(), SpinChainCouplings::compass(params));
  if (sector == Sector::full) {
    auto even = ed_low_spectrum(params, Sector::even, k);
    auto odd = ed_low_spectrum(params, Sector::odd, k);
    even.insert(even.end(), odd.begin(), odd.end());
    std::sort(even.begin(), even.end());
    even.resize(k);
    return even;
  }
  const auto basis = ham.sector_basis(sector);
  std::vector<double> values;
  std::vector<Eigen::VectorXd> vectors;
  detail::sector_lowest(ham, basis, k, values, vectors);
  return values;
}

/// All 2^N levels; practical only for small chains.
inline std::vector<double> ed_full_spectrum(const ModelParams& params) {
  params.validate();
  if (params.n_sites() > 10)
    throw size_limit_error("ed_full_spectrum: limited to N <= 10 sites");
  SpinHamiltonian ham(params.n_sites(), SpinChainCouplings::compass(params));
  const auto basis = ham.sector_basis(Sector::full);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ham.dense(basis));
  return std::vector<double>(es.eigenvalues().data(),
                             es.eigenvalues().data() + es.eigenvalues().size());
}

// ---- observables evaluated directly on an ED state vector ----

inline double ed_overlap(const EDGroundState& a, const EDGroundState& b) {
  if (a.vector.size() != b.vector.size())
    throw config_error("ed_overlap: mismatched dimensions");
  return std::abs(a.vector.dot(b.vector));
}

namespace detail {

// sigma^y |1> = i|0>, sigma^y |0> = -i|1>, with bit 1 = up.
inline std::complex<double> pauli_apply(char which, std::size_t& mask, int bit) {
  const bool up = (mask >> bit) & 1u;
  switch (which) {
    case 'x':
      mask ^= (std::size_t{1} << bit);
      return {1.0, 0.0};
    case 'y':
      mask ^= (std::size_t{1} << bit);
      return up ? std::complex<double>(0.0, 1.0) : std::complex<double>(0.0, -1.0);
    case 'z':
      return {up ? 1.0 : -1.0, 0.0};
    default:
      throw config_error("pauli_apply: unknown operator");
  }
}

}  // namespace detail

/// <sigma^a_i sigma^b_j> on the state, flat 1-based sites.
inline std::complex<double> ed_pauli_correlator(const EDGroundState& state, char a, int site_i,
                                                char b, int site_j) {
  const int n = state.n_sites;
  if (site_i < 1 || site_i > n || site_j < 1 || site_j > n || site_i == site_j)
    throw config_error("ed_pauli_correlator: invalid site pair");
  std::complex<double> acc = 0.0;
  const std::size_t dim = state.vector.size();
  for (std::size_t mask = 0; mask < dim; ++mask) {
    const double amp = state.vector(static_cast<Eigen::Index>(mask));
    if (amp == 0.0) continue;
    std::size_t out = mask;
    std::complex<double> coeff = detail::pauli_apply(b, out, site_j - 1);
    coeff *= detail::pauli_apply(a, out, site_i - 1);
    acc += coeff * amp * state.vector(static_cast<Eigen::Index>(out));
  }
  return acc;
}

/// <sigma^x_i (prod_{i<l<j} sigma^z_l) sigma^x_j> on the state.
inline double ed_string_correlator_xx(const EDGroundState& state, int site_i, int site_j) {
  const int n = state.n_sites;
  if (site_i < 1 || site_j <= site_i || site_j > n)
    throw config_error("ed_string_correlator_xx: need 1 <= i < j <= N");
  double acc = 0.0;
  const std::size_t dim = state.vector.size();
  for (std::size_t mask = 0; mask < dim; ++mask) {
    const double amp = state.vector(static_cast<Eigen::Index>(mask));
    if (amp == 0.0) continue;
    double string = 1.0;
    for (int l = site_i + 1; l <= site_j - 1; ++l)
      string *= ((mask >> (l - 1)) & 1u) ? 1.0 : -1.0;
    const std::size_t out =
        mask ^ (std::size_t{1} << (site_i - 1)) ^ (std::size_t{1} << (site_j - 1));
    acc += string * amp * state.vector(static_cast<Eigen::Index>(out));
  }
  return acc;
}

inline double ed_sigma_z(const EDGroundState& state, int site) {
  double acc = 0.0;
  const std::size_t dim = state.vector.size();
  for (std::size_t mask = 0; mask < dim; ++mask) {
    const double amp = state.vector(static_cast<Eigen::Index>(mask));
    if (amp == 0.0) continue;
    acc += (((mask >> (site - 1)) & 1u) ? 1.0 : -1.0) * amp * amp;
  }
  return acc;
}

/// Cell-summed magnetization <sigma^z_{1,n} + sigma^z_{2,n}>, cell averaged.
inline double ed_magnetization(const EDGroundState& state) {
  double acc = 0.0;
  for (int m = 1; m <= state.n_sites; ++m) acc += ed_sigma_z(state, m);
  return acc / (state.n_sites / 2);
}

/// Two-site reduced density matrix in the basis {uu, ud, du, dd}.
inline Eigen::Matrix4d ed_two_site_rdm(const EDGroundState& state, int site_i, int site_j) {
  const int n = state.n_sites;
  if (site_i < 1 || site_j < 1 || site_i >= site_j || site_j > n)
    throw config_error("ed_two_site_rdm: need 1 <= i < j <= N");
  const int bi = site_i - 1, bj = site_j - 1;
  Eigen::Matrix4d rho = Eigen::Matrix4d::Zero();
  const std::size_t dim = state.vector.size();
  auto code = [&](std::size_t mask) {
    const int ui = (mask >> bi) & 1u, uj = (mask >> bj) & 1u;
    return (1 - ui) * 2 + (1 - uj);
  };
  auto with_code = [&](std::size_t mask, int c) {
    std::size_t m = mask & ~((std::size_t{1} << bi) | (std::size_t{1} << bj));
    if (!((c >> 1) & 1)) m |= (std::size_t{1} << bi);
    if (!(c & 1)) m |= (std::size_t{1} << bj);
    return m;
  };
  for (std::size_t mask = 0; mask < dim; ++mask) {
    const double amp = state.vector(static_cast<Eigen::Index>(mask));
    if (amp == 0.0) continue;
    const int ca = code(mask);
    for (int cb = 0; cb < 4; ++cb) {
      const double amp_b = state.vector(static_cast<Eigen::Index>(with_code(mask, cb)));
      if (amp_b != 0.0) rho(ca, cb) += amp * amp_b;
    }
  }
  return rho;
}

/// von Neumann entropy, in bits, of the first L flat sites.
inline double ed_block_entropy(const EDGroundState& state, int L) {
  const int n = state.n_sites;
  if (L < 0 || L > n) throw config_error("ed_block_entropy: L out of range");
  if (L == 0 || L == n) return 0.0;
  if (L > 12) throw size_limit_error("ed_block_entropy: block too large");
  const std::size_t block_dim = std::size_t{1} << L;
  const std::size_t env_dim = std::size_t{1} << (n - L);
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(block_dim, block_dim);
  for (std::size_t env = 0; env < env_dim; ++env) {
    const std::size_t base = env << L;
    for (std::size_t a = 0; a < block_dim; ++a) {
      const double amp_a = state.vector(static_cast<Eigen::Index>(base | a));
      if (amp_a == 0.0) continue;
      for (std::size_t b = 0; b < block_dim; ++b)
        rho(a, b) += amp_a * state.vector(static_cast<Eigen::Index>(base | b));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam > 1e-14) s -= lam * std::log2(lam);
  }
  return s;
}

/// Fermionic two-point functions of the Jordan-Wigner fermions on the ED
/// state: f_{mn} = <a_m^dag a_n>, g_{mn} = <a_m^dag a_n^dag>, with the string
/// of (-sigma^z) between the endpoints.
inline void ed_fermion_correlators(const EDGroundState& state, Eigen::MatrixXcd& f,
                                   Eigen::MatrixXcd& g) {
  const int n = state.n_sites;
  const std::size_t dim = state.vector.size();
  f = Eigen::MatrixXcd::Zero(n, n);
  g = Eigen::MatrixXcd::Zero(n, n);
  for (int m = 1; m <= n; ++m) {
    for (std::size_t mask = 0; mask < dim; ++mask) {
      const double amp = state.vector(static_cast<Eigen::Index>(mask));
      if (amp != 0.0 && ((mask >> (m - 1)) & 1u)) f(m - 1, m - 1) += amp * amp;
    }
  }
  for (int m = 1; m <= n; ++m) {
    for (int nn = m + 1; nn <= n; ++nn) {
      std::complex<double> facc = 0.0, gacc = 0.0;
      for (std::size_t mask = 0; mask < dim; ++mask) {
        const double amp = state.vector(static_cast<Eigen::Index>(mask));
        if (amp == 0.0) continue;
        double string = 1.0;
        for (int l = m + 1; l <= nn - 1; ++l)
          string *= ((mask >> (l - 1)) & 1u) ? -1.0 : 1.0;
        const bool up_m = (mask >> (m - 1)) & 1u;
        const bool up_n = (mask >> (nn - 1)) & 1u;
        if (!up_m && up_n) {  // sigma^+_m ... sigma^-_n
          const std::size_t out =
              (mask | (std::size_t{1} << (m - 1))) & ~(std::size_t{1} << (nn - 1));
          facc += string * amp * state.vector(static_cast<Eigen::Index>(out));
        }
        if (!up_m && !up_n) {  // sigma^+_m ... sigma^+_n
          const std::size_t out =
              mask | (std::size_t{1} << (m - 1)) | (std::size_t{1} << (nn - 1));
          gacc += string * amp * state.vector(static_cast<Eigen::Index>(out));
        }
      }
      f(m - 1, nn - 1) = facc;
      f(nn - 1, m - 1) = std::conj(facc);
      g(m - 1, nn - 1) = gacc;
      g(nn - 1, m - 1) = -gacc;
    }
  }
}

}  // namespace compass
