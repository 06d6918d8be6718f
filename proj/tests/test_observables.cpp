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
#include <cmath>
#include <random>

#include "compass/ed_oracle.hpp"
#include "compass/observables.hpp"

using namespace compass;

namespace {
ModelParams make(double alpha, double h, int n_cells, double beta = 1.0) {
  ModelParams p;
  p.J = 1.0;
  p.alpha = alpha;
  p.beta = beta;
  p.h = h;
  p.n_cells = n_cells;
  p.bc = Boundary::ABC;
  return p;
}
}  // namespace

TEST_CASE("fidelity at zero step is one") {
  const auto f = fidelity(make(0.7, 0.4, 8), Direction::alpha, 0.0);
  CHECK(f.value == Approx(1.0).margin(1e-12));
  CHECK_FALSE(f.degenerate);
}

TEST_CASE("fidelity matches the brute-force overlap") {
  const auto p = make(0.5, 0.2, 4);
  const double f_blocks = fidelity(p, Direction::alpha, 1e-4).value;
  ModelParams p2 = p;
  p2.alpha += 1e-4;
  const double f_ed = ed_overlap(ed_ground_state(p, Sector::even),
                                 ed_ground_state(p2, Sector::even));
  CHECK(f_blocks == Approx(f_ed).margin(1e-8));
}

TEST_CASE("fidelity is invariant under block phase changes") {
  // absolute per-block overlaps cannot see a global phase of either vector;
  // cross-check the product against an explicitly rephased evaluation
  const auto p = make(0.8, 0.6, 8);
  const GroundState a = ground_state(p);
  ModelParams pb = p;
  pb.h += 1e-4;
  const GroundState b = ground_state(pb);
  std::mt19937 rng(5u);
  std::uniform_real_distribution<double> uni(0.0, 6.28);
  double f1 = 1.0, f2 = 1.0;
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    const cdouble phase = std::exp(cdouble(0.0, uni(rng)));
    f1 *= std::abs((a.blocks[i].amplitudes.adjoint() * b.blocks[i].amplitudes)(0, 0));
    f2 *= std::abs((a.blocks[i].amplitudes.adjoint() * (phase * b.blocks[i].amplitudes))(0, 0));
  }
  CHECK(f1 == Approx(f2).epsilon(1e-12));
  CHECK(fidelity(p, Direction::h, 1e-4).value == Approx(f1).epsilon(1e-10));
}

TEST_CASE("one minus fidelity scales quadratically in the step") {
  const auto p = make(0.6, 0.9, 16);
  const double r3 = (1.0 - fidelity(p, Direction::h, 1e-3).value) / 1e-6;
  const double r4 = (1.0 - fidelity(p, Direction::h, 5e-4).value) / 2.5e-7;
  CHECK(r3 == Approx(r4).epsilon(0.05));
}

TEST_CASE("fidelity susceptibility basics") {
  CHECK_THROWS_AS(fidelity_susceptibility(make(1.0, 0.5, 8), Direction::h, 0.0), config_error);
  const auto chi = fidelity_susceptibility(make(0.0, 1.0, 16), Direction::alpha, 1e-4);
  CHECK(chi.value >= 0.0);
  CHECK(chi.value < 100.0);
  // smooth along the decoupled-dimer line
  const auto chi2 = fidelity_susceptibility(make(0.0, 1.05, 16), Direction::alpha, 1e-4);
  CHECK(std::abs(chi.value - chi2.value) < 0.5 * std::max(chi.value, 1.0));
}

TEST_CASE("richardson extrapolation stays close to the smallest step") {
  const auto p = make(0.9, 0.7, 12);
  const double chi_small = fidelity_susceptibility(p, Direction::h, 1e-4).value;
  const double chi_ext = fidelity_susceptibility_extrapolated(p, Direction::h).value;
  CHECK(chi_ext == Approx(chi_small).epsilon(1e-3));
}

TEST_CASE("degenerate endpoints are flagged") {
  const auto f = fidelity(make(1.0, 0.0, 8), Direction::alpha, 1e-4);
  CHECK(f.degenerate);
}

TEST_CASE("two-site density matrix in the polarized limit") {
  const auto rho = two_site_density_matrix(ground_state(make(1.0, 1e3, 4)), 1, 2);
  CHECK(rho.rho(0, 0).real() == Approx(1.0).margin(1e-5));
  CHECK(std::abs(rho.rho.trace() - cdouble(1.0, 0.0)) < 1e-12);
  // residual entanglement is first order in J/h
  CHECK(concurrence(rho) == Approx(0.0).margin(2e-3));
}

TEST_CASE("decoupled sites carry no intra-cell entanglement") {
  const auto rho = two_site_density_matrix(ground_state(make(0.0, 0.0, 4)), 1, 2);
  CHECK(concurrence(rho) == Approx(0.0).margin(1e-10));
}

TEST_CASE("density matrix matches the brute-force partial trace") {
  const auto p = make(1.0, 0.4, 6);
  const auto rho = two_site_density_matrix(ground_state(p), 1, 2);
  const auto rho_ed = ed_two_site_rdm(ed_ground_state(p, Sector::even), 1, 2);
  CHECK((rho.rho - rho_ed.cast<cdouble>()).cwiseAbs().maxCoeff() < 1e-8);

  const auto rho_inter = two_site_density_matrix(ground_state(p), 2, 3);
  const auto rho_inter_ed = ed_two_site_rdm(ed_ground_state(p, Sector::even), 2, 3);
  CHECK((rho_inter.rho - rho_inter_ed.cast<cdouble>()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("density matrix invariants") {
  const auto rho = two_site_density_matrix(ground_state(make(1.2, 0.7, 8)), 1, 2);
  CHECK(std::abs(rho.rho.trace() - cdouble(1.0, 0.0)) < 1e-12);
  CHECK((rho.rho - rho.rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho.rho, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() > -1e-9);
  CHECK(rho.p[0][0] == 1.0);
}

TEST_CASE("pauli coefficient sparsity against brute force") {
  const auto p = make(0.8, 0.4, 4);
  const auto rho = ed_two_site_rdm(ed_ground_state(p, Sector::even), 1, 2).cast<cdouble>();
  auto pauli = [](int a) {
    Eigen::Matrix2cd m;
    switch (a) {
      case 0: m << 1, 0, 0, 1; break;
      case 1: m << 0, 1, 1, 0; break;
      case 2: m << 0, cdouble(0, -1), cdouble(0, 1), 0; break;
      default: m << 1, 0, 0, -1; break;
    }
    return m;
  };
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      Eigen::Matrix4cd op = Eigen::Matrix4cd::Zero();
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) op.block<2, 2>(2 * i, 2 * j) = pauli(a)(i, j) * pauli(b);
      const cdouble val = (op * rho).trace();
      const bool allowed = (a == b) || (a == 0 && b == 3) || (a == 3 && b == 0);
      if (!allowed) {
        CHECK(std::abs(val) < 1e-9);
      } else {
        CHECK(std::abs(val.imag()) < 1e-9);  // surviving coefficients are real
      }
    }
}

TEST_CASE("concurrence of hand-built states") {
  Eigen::Vector4cd bell;
  bell << 1.0 / std::sqrt(2.0), 0, 0, -1.0 / std::sqrt(2.0);
  CHECK(concurrence(Eigen::Matrix4cd(bell * bell.adjoint())) == Approx(1.0).margin(1e-12));

  Eigen::Vector4cd product;
  product << 1, 0, 0, 0;
  CHECK(concurrence(Eigen::Matrix4cd(product * product.adjoint())) == Approx(0.0).margin(1e-12));
}

TEST_CASE("concurrence is invariant under local unitaries") {
  const auto rho = two_site_density_matrix(ground_state(make(1.0, 0.3, 8)), 1, 2);
  const double base = concurrence(rho);
  std::mt19937 rng(23u);
  std::uniform_real_distribution<double> uni(0.0, 3.14159);
  for (int trial = 0; trial < 5; ++trial) {
    const double t1 = uni(rng), t2 = uni(rng), t3 = uni(rng);
    Eigen::Matrix2cd u;
    u << std::cos(t1), std::sin(t1) * std::exp(cdouble(0, t2)),
        -std::sin(t1) * std::exp(cdouble(0, t3)), std::cos(t1) * std::exp(cdouble(0, t2 + t3));
    Eigen::Matrix2cd v;
    const double s1 = uni(rng), s2 = uni(rng), s3 = uni(rng);
    v << std::cos(s1), std::sin(s1) * std::exp(cdouble(0, s2)),
        -std::sin(s1) * std::exp(cdouble(0, s3)), std::cos(s1) * std::exp(cdouble(0, s2 + s3));
    Eigen::Matrix4cd uv = Eigen::Matrix4cd::Zero();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) uv.block<2, 2>(2 * i, 2 * j) = u(i, j) * v;
    CHECK(concurrence(Eigen::Matrix4cd(uv * rho.rho * uv.adjoint())) ==
          Approx(base).margin(1e-8));
  }
}

TEST_CASE("block entropy edge cases and symmetry") {
  const auto gs = ground_state(make(1.0, 0.4, 16));
  const auto mc = majorana_matrix(gs);
  CHECK(block_entropy(mc, 0) == 0.0);
  CHECK(block_entropy(mc, 32) == Approx(0.0).margin(1e-8));
  for (int L : {3, 5, 11}) {
    CHECK(block_entropy(mc, L) >= 0.0);
    CHECK(block_entropy(mc, L) == Approx(block_entropy(mc, 32 - L)).margin(1e-8));
  }
  CHECK_THROWS_AS(block_entropy(mc, -1), config_error);
  CHECK_THROWS_AS(block_entropy(mc, 33), config_error);
}

TEST_CASE("polarized chain carries almost no block entropy") {
  const auto mc = majorana_matrix(ground_state(make(1.0, 1e3, 8)));
  for (int L = 0; L <= 16; ++L) CHECK(block_entropy(mc, L) < 1e-2);
}

TEST_CASE("block entropy matches the brute-force reduced state") {
  const auto p = make(1.0, 0.3, 6);
  const double ours = block_entropy(ground_state(p), 4);
  const double ed = ed_block_entropy(ed_ground_state(p, Sector::even), 4);
  CHECK(ours == Approx(ed).margin(1e-6));
  // frozen oracle anchor
  CHECK(ours == Approx(1.452847655056457).margin(1e-6));
}

TEST_CASE("magnetization limits and oracle agreement") {
  CHECK(magnetization(make(1.0, 0.0, 8)) == Approx(0.0).margin(1e-10));
  CHECK(magnetization(make(1.0, 1e4, 8)) == Approx(2.0).margin(1e-6));

  const auto p = make(1.0, 0.45, 6);
  const double ed = ed_magnetization(ed_ground_state(p, Sector::even));
  CHECK(magnetization(p) == Approx(ed).margin(1e-8));
  // frozen oracle anchor
  CHECK(magnetization(make(1.0, 0.3, 6)) == Approx(0.574931194833887).margin(1e-8));
}

TEST_CASE("susceptibility grid validation and symmetry") {
  const auto p = make(1.0, 0.0, 8);
  std::vector<double> short_grid{0.0, 0.1};
  CHECK_THROWS_AS(susceptibility(p, short_grid), config_error);
  std::vector<double> bad{0.0, 0.2, 0.1};
  CHECK_THROWS_AS(susceptibility(p, bad), config_error);

  std::vector<double> grid;
  for (int i = -6; i <= 6; ++i) grid.push_back(0.1 * i);
  const auto chi = susceptibility(p, grid);
  for (std::size_t i = 0; i < grid.size() / 2; ++i)
    CHECK(chi[i] == Approx(chi[grid.size() - 1 - i]).margin(1e-8));

  // polarized regime: essentially no response
  std::vector<double> far{40.0, 40.1, 40.2, 40.3};
  const auto chi_far = susceptibility(p, far);
  for (double c : chi_far) CHECK(std::abs(c) < 1e-3);
}

TEST_CASE("susceptibility matches a brute-force finite difference") {
  const auto p = make(1.0, 0.0, 6);
  std::vector<double> grid{0.30, 0.35, 0.40, 0.45, 0.50};
  const auto chi = susceptibility(p, grid);
  ModelParams lo = p, hi = p;
  lo.h = 0.35;
  hi.h = 0.45;
  const double ed_chi = (ed_magnetization(ed_ground_state(hi, Sector::even)) -
                         ed_magnetization(ed_ground_state(lo, Sector::even))) /
                        0.1;
  CHECK(chi[2] == Approx(ed_chi).margin(1e-5));
}
