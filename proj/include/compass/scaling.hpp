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

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "compass/errors.hpp"
#include "compass/observables.hpp"

namespace compass {

struct ScalingFit {
  double exponent = 0.0;
  double amplitude = 0.0;
  std::pair<double, double> window{0.0, 0.0};
  double residual = 0.0;   // RMS misfit in fit space
  double std_error = 0.0;  // standard error of the exponent
  bool saturated = false;  // set by the entropy saturation detector
};

namespace detail {

struct LineFit {
  double slope = 0.0, intercept = 0.0, residual = 0.0, slope_se = 0.0;
};

inline LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw config_error("least_squares_line: degenerate abscissa");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.slope * x[i] - fit.intercept;
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / n);
  fit.slope_se = n > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0.0;
  return fit;
}

}  // namespace detail

/// Least-squares line in (log x, log y) over the window; the exponent is the
/// slope, the amplitude the exponential of the intercept.
inline ScalingFit power_law_fit(const std::vector<std::pair<double, double>>& points,
                                std::pair<double, double> window) {
  std::vector<double> lx, ly;
  for (const auto& [x, y] : points) {
    if (x < window.first || x > window.second) continue;
    if (!(x > 0.0) || !(y > 0.0))
      throw config_error("power_law_fit: data must be positive inside the window");
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  if (lx.size() < 4) throw config_error("power_law_fit: need at least 4 points in the window");
  const auto line = detail::least_squares_line(lx, ly);
  ScalingFit fit;
  fit.exponent = line.slope;
  fit.amplitude = std::exp(line.intercept);
  fit.window = window;
  fit.residual = line.residual;
  fit.std_error = line.slope_se;
  return fit;
}

/// Fit S_L = (c/3) log2 L + const over the window and report c. Off-critical
/// curves are detected by a flat upper half-window (< 0.05 bits per octave)
/// and flagged as saturated.
inline ScalingFit central_charge_fit(const EntropyCurve& curve,
                                     std::pair<double, double> window) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < curve.block_sizes.size(); ++i) {
    const double L = curve.block_sizes[i];
    if (L < window.first || L > window.second || !(L > 0)) continue;
    lx.push_back(std::log2(L));
    ly.push_back(curve.entropies[i]);
  }
  if (lx.size() < 4)
    throw config_error("central_charge_fit: need at least 4 block sizes in the window");
  const auto line = detail::least_squares_line(lx, ly);
  ScalingFit fit;
  fit.exponent = 3.0 * line.slope;
  fit.amplitude = line.intercept;
  fit.window = window;
  fit.residual = line.residual;
  fit.std_error = 3.0 * line.slope_se;

  // saturation detector over the upper half of the log2 window
  const double mid = 0.5 * (std::log2(window.first) + std::log2(window.second));
  std::vector<double> ux, uy;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    if (lx[i] >= mid) {
      ux.push_back(lx[i]);
      uy.push_back(ly[i]);
    }
  }
  if (ux.size() >= 2) {
    const auto upper = detail::least_squares_line(ux, uy);
    fit.saturated = upper.slope < 0.05;
  }
  return fit;
}

// ---- finite-size data collapse ----

struct CollapseCurve {
  int n_cells = 0;
  std::vector<std::pair<double, double>> points;  // (h, chi_F / N')
};

struct CollapseResult {
  double nu_best = 0.0;
  double residual_best = 0.0;
  std::vector<std::pair<double, double>> scan;  // (nu, residual)
};

namespace detail {

inline double interpolate(const std::vector<double>& xs, const std::vector<double>& ys,
                          double x) {
  auto it = std::lower_bound(xs.begin(), xs.end(), x);
  if (it == xs.begin()) return ys.front();
  if (it == xs.end()) return ys.back();
  const std::size_t hi = it - xs.begin();
  const std::size_t lo = hi - 1;
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return (1.0 - t) * ys[lo] + t * ys[hi];
}

inline double collapse_residual(const std::vector<CollapseCurve>& curves, double h_max,
                                double nu) {
  const std::size_t nc = curves.size();
  std::vector<std::vector<double>> xs(nc), ys(nc);
  double support_lo = -std::numeric_limits<double>::infinity();
  double support_hi = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < nc; ++c) {
    const double scale = std::pow(static_cast<double>(curves[c].n_cells), nu);
    double chi_max = -std::numeric_limits<double>::infinity();
    for (const auto& [h, chi] : curves[c].points) chi_max = std::max(chi_max, chi);
    for (const auto& [h, chi] : curves[c].points) {
      xs[c].push_back(scale * (h - h_max));
      ys[c].push_back((chi_max - chi) / chi);
    }
    support_lo = std::max(support_lo, xs[c].front());
    support_hi = std::min(support_hi, xs[c].back());
  }
  if (!(support_hi > support_lo))
    throw config_error("fs_collapse: rescaled curves have no common support");

  std::vector<double> grid;
  for (const auto& v : xs)
    for (double x : v)
      if (x >= support_lo && x <= support_hi) grid.push_back(x);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double acc = 0.0;
  std::size_t count = 0;
  for (double x : grid) {
    for (std::size_t a = 0; a < nc; ++a) {
      const double ya = interpolate(xs[a], ys[a], x);
      for (std::size_t b = a + 1; b < nc; ++b) {
        const double yb = interpolate(xs[b], ys[b], x);
        acc += (ya - yb) * (ya - yb);
        ++count;
      }
    }
  }
  return count ? acc / count : 0.0;
}

}  // namespace detail

/// Scaling collapse of (chi_max - chi)/chi against N'^nu (h - h_max): a coarse
/// nu grid of step 0.05 followed by golden-section refinement. Ties prefer
/// the smaller nu.
inline CollapseResult fs_collapse(const std::vector<CollapseCurve>& curves, double h_max,
                                  std::pair<double, double> nu_range) {
  if (curves.size() < 3) throw config_error("fs_collapse: need at least 3 system sizes");
  for (const auto& c : curves)
    if (c.points.size() < 4) throw config_error("fs_collapse: curves too short");

  CollapseResult result;
  double best = std::numeric_limits<double>::infinity();
  double nu_best = nu_range.first;
  for (double nu = nu_range.first; nu <= nu_range.second + 1e-12; nu += 0.05) {
    const double r = detail::collapse_residual(curves, h_max, nu);
    result.scan.emplace_back(nu, r);
    if (r < best) {
      best = r;
      nu_best = nu;
    }
  }

  double lo = std::max(nu_range.first, nu_best - 0.05);
  double hi = std::min(nu_range.second, nu_best + 0.05);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = detail::collapse_residual(curves, h_max, x1);
  double f2 = detail::collapse_residual(curves, h_max, x2);
  for (int it = 0; it < 48 && hi - lo > 1e-5; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = detail::collapse_residual(curves, h_max, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = detail::collapse_residual(curves, h_max, x2);
    }
  }
  const double nu_refined = 0.5 * (lo + hi);
  const double r_refined = detail::collapse_residual(curves, h_max, nu_refined);
  if (r_refined < best) {
    best = r_refined;
    nu_best = nu_refined;
  }
  result.nu_best = nu_best;
  result.residual_best = best;
  return result;
}

}  // namespace compass
