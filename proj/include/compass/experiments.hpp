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
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "compass/ed_oracle.hpp"
#include "compass/errors.hpp"
#include "compass/observables.hpp"
#include "compass/parallel.hpp"
#include "compass/scaling.hpp"
#include "compass/solver.hpp"
#include "compass/version.hpp"

namespace compass {

using nlohmann::json;

struct SweepSpec {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;

  std::vector<double> values() const {
    if (count < 1) throw config_error("sweep count must be >= 1");
    std::vector<double> v;
    v.reserve(count);
    if (count == 1) {
      v.push_back(start);
      return v;
    }
    if (!(stop > start)) throw config_error("sweep grid must be increasing");
    for (int i = 0; i < count; ++i)
      v.push_back(start + (stop - start) * static_cast<double>(i) / (count - 1));
    return v;
  }
};

struct FitSpec {
  std::optional<std::pair<double, double>> window;
  double delta = 1e-4;               // fidelity step (forward difference)
  Direction direction = Direction::h;
  double h_c = 0.0;                  // pinned critical field for the gamma fit
  int points = 13;                   // log-spaced points for the gamma fit
  std::pair<double, double> nu_range{0.5, 2.0};
};

struct ExperimentConfig {
  std::string experiment;
  ModelParams params;
  std::optional<SweepSpec> alpha_sweep;
  std::optional<SweepSpec> h_sweep;
  std::vector<int> sizes;            // fs-scaling system sizes
  std::optional<std::pair<int, int>> r_range;
  int block_step = 8;                // entropy L grid step
  std::optional<int> block_max;
  FitSpec fit;
  DegeneracyResolution branch = DegeneracyResolution::field;
  std::vector<std::string> curves;   // fs-scaling: pre-computed fs-scan CSVs
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  int threads = 0;
};

namespace detail {

inline const std::set<std::string>& known_experiments() {
  static const std::set<std::string> names{
      "gs-energy",   "spectrum",   "gap",        "fidelity-map", "fs-scan",
      "fs-scaling",  "concurrence", "entropy",   "correlator",   "magnetization",
      "oracle-validate", "ising-check"};
  return names;
}

inline void require_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& context) {
  if (!j.is_object()) throw config_error("config: " + context + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw config_error("config: unknown key '" + it.key() + "' in " + context);
}

inline SweepSpec parse_sweep(const json& j, const std::string& context) {
  require_keys(j, {"start", "stop", "count"}, context);
  SweepSpec s;
  s.start = j.value("start", 0.0);
  s.stop = j.value("stop", s.start);
  s.count = j.value("count", 1);
  (void)s.values();  // validate
  return s;
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& j) {
  detail::require_keys(
      j, {"experiment", "params", "sweep", "fit", "output", "seed", "threads", "curves"},
      "top level");
  ExperimentConfig cfg;
  if (!j.contains("experiment")) throw config_error("config: missing 'experiment'");
  cfg.experiment = j.at("experiment").get<std::string>();
  if (!detail::known_experiments().count(cfg.experiment))
    throw config_error("config: unknown experiment '" + cfg.experiment + "'");

  cfg.params.J = 1.0;
  cfg.params.n_cells = 8;
  if (j.contains("params")) {
    const json& p = j.at("params");
    detail::require_keys(p, {"J", "alpha", "beta", "h", "n_cells", "bc"}, "params");
    cfg.params.J = p.value("J", 1.0);
    cfg.params.alpha = p.value("alpha", 1.0);
    cfg.params.beta = p.value("beta", 1.0);
    cfg.params.h = p.value("h", 0.0);
    cfg.params.n_cells = p.value("n_cells", 8);
    if (p.contains("bc")) cfg.params.bc = boundary_from_string(p.at("bc").get<std::string>());
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    detail::require_keys(s, {"alpha", "h", "sizes", "r", "L"}, "sweep");
    if (s.contains("alpha")) cfg.alpha_sweep = detail::parse_sweep(s.at("alpha"), "sweep.alpha");
    if (s.contains("h")) cfg.h_sweep = detail::parse_sweep(s.at("h"), "sweep.h");
    if (s.contains("sizes")) {
      cfg.sizes = s.at("sizes").get<std::vector<int>>();
      if (cfg.sizes.empty()) throw config_error("config: sweep.sizes must be nonempty");
    }
    if (s.contains("r")) {
      detail::require_keys(s.at("r"), {"min", "max"}, "sweep.r");
      cfg.r_range = {s.at("r").value("min", 0), s.at("r").value("max", 0)};
    }
    if (s.contains("L")) {
      detail::require_keys(s.at("L"), {"step", "max"}, "sweep.L");
      cfg.block_step = s.at("L").value("step", 8);
      if (s.at("L").contains("max")) cfg.block_max = s.at("L").at("max").get<int>();
    }
  }
  if (j.contains("fit")) {
    const json& f = j.at("fit");
    detail::require_keys(f, {"window", "delta", "direction", "h_c", "points", "nu_range", "branch"},
                         "fit");
    if (f.contains("window")) {
      const auto w = f.at("window").get<std::vector<double>>();
      if (w.size() != 2) throw config_error("config: fit.window must have two entries");
      cfg.fit.window = {w[0], w[1]};
    }
    cfg.fit.delta = f.value("delta", 1e-4);
    if (f.contains("direction")) {
      const std::string d = f.at("direction").get<std::string>();
      if (d == "alpha")
        cfg.fit.direction = Direction::alpha;
      else if (d == "h")
        cfg.fit.direction = Direction::h;
      else
        throw config_error("config: fit.direction must be 'alpha' or 'h'");
    }
    cfg.fit.h_c = f.value("h_c", 0.0);
    cfg.fit.points = f.value("points", 13);
    if (f.contains("nu_range")) {
      const auto w = f.at("nu_range").get<std::vector<double>>();
      if (w.size() != 2) throw config_error("config: fit.nu_range must have two entries");
      cfg.fit.nu_range = {w[0], w[1]};
    }
    if (f.contains("branch")) {
      const std::string b = f.at("branch").get<std::string>();
      if (b == "field")
        cfg.branch = DegeneracyResolution::field;
      else if (b == "beta")
        cfg.branch = DegeneracyResolution::beta_limit;
      else
        throw config_error("config: fit.branch must be 'field' or 'beta'");
    }
  }
  if (j.contains("curves")) cfg.curves = j.at("curves").get<std::vector<std::string>>();
  if (j.contains("output")) cfg.output_dir = j.at("output").get<std::string>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
  return cfg;
}

namespace detail {

inline json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = cfg.experiment;
  j["params"] = {{"J", cfg.params.J},       {"alpha", cfg.params.alpha},
                 {"beta", cfg.params.beta}, {"h", cfg.params.h},
                 {"n_cells", cfg.params.n_cells}, {"bc", to_string(cfg.params.bc)}};
  json sweep;
  if (cfg.alpha_sweep)
    sweep["alpha"] = {{"start", cfg.alpha_sweep->start},
                      {"stop", cfg.alpha_sweep->stop},
                      {"count", cfg.alpha_sweep->count}};
  if (cfg.h_sweep)
    sweep["h"] = {{"start", cfg.h_sweep->start},
                  {"stop", cfg.h_sweep->stop},
                  {"count", cfg.h_sweep->count}};
  if (!cfg.sizes.empty()) sweep["sizes"] = cfg.sizes;
  if (cfg.r_range) sweep["r"] = {{"min", cfg.r_range->first}, {"max", cfg.r_range->second}};
  sweep["L"] = {{"step", cfg.block_step}};
  if (cfg.block_max) sweep["L"]["max"] = *cfg.block_max;
  j["sweep"] = sweep;
  json fit;
  if (cfg.fit.window) fit["window"] = {cfg.fit.window->first, cfg.fit.window->second};
  fit["delta"] = cfg.fit.delta;
  fit["direction"] = to_string(cfg.fit.direction);
  fit["h_c"] = cfg.fit.h_c;
  fit["points"] = cfg.fit.points;
  fit["nu_range"] = {cfg.fit.nu_range.first, cfg.fit.nu_range.second};
  fit["branch"] = cfg.branch == DegeneracyResolution::field ? "field" : "beta";
  j["fit"] = fit;
  j["seed"] = cfg.seed;
  return j;
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Hash of the physics-defining part of the config (outputs and thread counts
/// excluded). compat_hash additionally masks the system size, so curves that
/// differ only in N' can be compared by the scaling validator.
inline std::string config_hash(const ExperimentConfig& cfg) {
  return hex64(fnv1a(config_to_json(cfg).dump()));
}

inline std::string compat_hash(const ExperimentConfig& cfg) {
  json j = config_to_json(cfg);
  j["params"].erase("n_cells");
  j.erase("experiment");
  return hex64(fnv1a(j.dump()));
}

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const ExperimentConfig& cfg,
            const std::vector<std::string>& columns)
      : out_(path, std::ios::binary) {
    if (!out_) throw config_error("cannot open output file " + path.string());
    out_ << "# compass-chain " << kVersion << "\n";
    out_ << "# experiment: " << cfg.experiment << "\n";
    out_ << "# config_hash: " << config_hash(cfg) << "\n";
    out_ << "# compat_hash: " << compat_hash(cfg) << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
      out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
      out_ << fmt17(values[i]) << (i + 1 < values.size() ? "," : "\n");
  }

 private:
  std::ofstream out_;
};

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot open output file " + path.string());
  out << j.dump(2) << "\n";
}

inline std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) throw config_error("bad logarithmic grid");
  std::vector<double> g;
  g.reserve(n);
  for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return g;
}

struct ExperimentIo {
  std::filesystem::path dir;
  json metadata;
  std::vector<std::string> outputs;

  ExperimentIo(const ExperimentConfig& cfg) : dir(cfg.output_dir) {
    std::filesystem::create_directories(dir);
    metadata["experiment"] = cfg.experiment;
    metadata["config"] = config_to_json(cfg);
    metadata["config_hash"] = config_hash(cfg);
    metadata["compat_hash"] = compat_hash(cfg);
    metadata["version"] = kVersion;
    metadata["threads"] = max_threads();
  }

  std::filesystem::path file(const std::string& name) {
    outputs.push_back(name);
    return dir / name;
  }
};

// ---- individual experiments ----

inline void run_gs_energy(const ExperimentConfig& cfg, ExperimentIo& io) {
  const bool sweep_alpha = cfg.alpha_sweep.has_value();
  const SweepSpec sweep = sweep_alpha ? *cfg.alpha_sweep
                                      : cfg.h_sweep.value_or(SweepSpec{cfg.params.h, 0, 1});
  const bool with_oracle = cfg.params.n_sites() <= kMaxEDSites;
  std::vector<std::string> cols{sweep_alpha ? "alpha" : "h", "e_exact"};
  if (with_oracle) {
    cols.push_back("e_ed");
    cols.push_back("abs_delta");
  }
  CsvWriter csv(io.file("gs_energy.csv"), cfg, cols);
  double max_delta = 0.0;
  bool degenerate = false;
  for (double x : sweep.values()) {
    ModelParams p = cfg.params;
    (sweep_alpha ? p.alpha : p.h) = x;
    const GroundState gs = ground_state(p, cfg.branch);
    degenerate = degenerate || gs.any_degenerate();
    std::vector<double> row{x, gs.energy};
    if (with_oracle) {
      ModelParams spin = p;
      spin.bc = Boundary::ABC;
      const Sector sector = p.bc == Boundary::PBC ? Sector::odd : Sector::even;
      const double ed = ed_ground_state(spin, sector).energy;
      row.push_back(ed);
      row.push_back(std::abs(gs.energy - ed));
      max_delta = std::max(max_delta, row.back());
    }
    csv.row(row);
  }
  if (with_oracle) io.metadata["max_abs_delta"] = max_delta;
  io.metadata["degenerate_points"] = degenerate;
}

inline void run_spectrum(const ExperimentConfig& cfg, ExperimentIo& io) {
  CsvWriter csv(io.file("spectrum.csv"), cfg, {"p_over_pi", "branch", "energy"});
  const MomentumGrid grid = momentum_grid(cfg.params);
  for (const Momentum& k : grid.points) {
    const Spectrum s = spectrum_analytic(cfg.params, k.radians());
    for (const auto& [label, e] : s.branches)
      csv.row({double(k.numerator) / k.n_cells, double(label), e});
  }
  if (cfg.params.bc == Boundary::PBC) {
    const auto omega = spectra_n4(cfg.params);
    CsvWriter n4(io.file("special_point_branches.csv"), cfg, {"branch", "energy"});
    for (int i = 8; i < 16; ++i) n4.row({double(i + 1), omega[i]});
  }
}

inline void run_gap(const ExperimentConfig& cfg, ExperimentIo& io) {
  const bool sweep_alpha = cfg.alpha_sweep.has_value();
  const SweepSpec sweep = sweep_alpha ? *cfg.alpha_sweep
                                      : cfg.h_sweep.value_or(SweepSpec{cfg.params.h, 0, 1});
  CsvWriter csv(io.file("gap.csv"), cfg, {sweep_alpha ? "alpha" : "h", "gap"});
  for (double x : sweep.values()) {
    ModelParams p = cfg.params;
    (sweep_alpha ? p.alpha : p.h) = x;
    csv.row({x, energy_gap(p)});
  }
}

inline void run_fidelity_map(const ExperimentConfig& cfg, ExperimentIo& io) {
  if (!cfg.alpha_sweep || !cfg.h_sweep)
    throw config_error("fidelity-map: needs both alpha and h sweeps");
  const auto alphas = cfg.alpha_sweep->values();
  const auto hs = cfg.h_sweep->values();
  const double delta = cfg.fit.delta;

  struct Row {
    double f_alpha, f_h;
    bool degenerate;
  };
  std::vector<Row> rows(alphas.size() * hs.size());
  parallel_for(alphas.size(), [&](std::size_t ia) {
    for (std::size_t ih = 0; ih < hs.size(); ++ih) {
      ModelParams p = cfg.params;
      p.alpha = alphas[ia];
      p.h = hs[ih];
      const auto fa = fidelity(p, Direction::alpha, delta);
      const auto fh = fidelity(p, Direction::h, delta);
      rows[ia * hs.size() + ih] = {fa.value, fh.value, fa.degenerate || fh.degenerate};
    }
  });

  CsvWriter csv(io.file("fidelity_map.csv"), cfg,
                {"alpha", "h", "f_alpha", "f_h", "f_min", "degenerate"});
  double global_min = 2.0;
  std::size_t imin = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double fmin = std::min(rows[i].f_alpha, rows[i].f_h);
    if (fmin < global_min) {
      global_min = fmin;
      imin = i;
    }
  }
  json minima = json::array();
  for (std::size_t ia = 0; ia < alphas.size(); ++ia)
    for (std::size_t ih = 0; ih < hs.size(); ++ih) {
      const Row& r = rows[ia * hs.size() + ih];
      const double fmin = std::min(r.f_alpha, r.f_h);
      csv.row({alphas[ia], hs[ih], r.f_alpha, r.f_h, fmin, double(r.degenerate)});
      if (fmin <= global_min + 1e-12)
        minima.push_back({{"alpha", alphas[ia]}, {"h", hs[ih]}});
    }
  io.metadata["f_min_global"] = global_min;
  io.metadata["minima"] = minima;
  io.metadata["argmin"] = {{"alpha", alphas[imin / hs.size()]}, {"h", hs[imin % hs.size()]}};
}

inline void run_fs_scan(const ExperimentConfig& cfg, ExperimentIo& io,
                        const std::string& filename = "fs_scan.csv") {
  const SweepSpec sweep = cfg.h_sweep.value_or(SweepSpec{cfg.params.h, 0, 1});
  const auto hs = sweep.values();
  CsvWriter csv(io.file(filename), cfg,
                {"h", "fidelity", "chi_F", "chi_F_per_Nprime", "degenerate"});
  std::vector<std::array<double, 3>> rows(hs.size());
  parallel_for(hs.size(), [&](std::size_t i) {
    ModelParams p = cfg.params;
    p.h = hs[i];
    const auto f = fidelity(p, cfg.fit.direction, cfg.fit.delta);
    const double chi = std::max(0.0, -2.0 * std::log(std::max(f.value, 1e-300)) /
                                         (cfg.fit.delta * cfg.fit.delta));
    rows[i] = {f.value, chi, double(f.degenerate)};
  });
  for (std::size_t i = 0; i < hs.size(); ++i)
    csv.row({hs[i], rows[i][0], rows[i][1], rows[i][1] / cfg.params.n_cells, rows[i][2]});
}

inline CollapseCurve read_fs_scan_csv(const std::filesystem::path& path,
                                      std::string& compat_out) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read curve file " + path.string());
  CollapseCurve curve;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.rfind("# compat_hash: ", 0) == 0) {
      compat_out = line.substr(15);
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line.rfind("h,", 0) != 0)
        throw config_error("unexpected header in curve file " + path.string());
      header_seen = true;
      continue;
    }
    double h, f, chi, chi_per, degen;
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg,%lg", &h, &f, &chi, &chi_per, &degen) != 5)
      throw config_error("malformed row in curve file " + path.string());
    curve.points.emplace_back(h, chi_per);
  }
  if (curve.points.size() < 4) throw config_error("curve file too short: " + path.string());
  return curve;
}

inline void run_fs_scaling(const ExperimentConfig& cfg, ExperimentIo& io) {
  std::vector<CollapseCurve> curves;
  std::vector<std::pair<double, double>> chimax_points;

  if (!cfg.curves.empty()) {
    // validator path: consume previously written fs-scan files, refusing
    // curves whose physics configuration differs
    std::string reference;
    for (const auto& path : cfg.curves) {
      std::string compat;
      CollapseCurve c = read_fs_scan_csv(path, compat);
      if (compat.empty())
        throw config_error("curve file missing compat hash: " + path);
      if (reference.empty()) reference = compat;
      if (compat != reference)
        throw config_error("refusing to compare curves with mismatched config hashes");
      c.n_cells = 0;  // recovered below from the peak height
      curves.push_back(std::move(c));
    }
    // chi_F/N' peaks at chi_max/N'; recover N' from the stored per-N' values
    // is not possible without metadata, so require sizes alongside
    if (cfg.sizes.size() != curves.size())
      throw config_error("fs-scaling: sweep.sizes must list the size of each curve file");
    for (std::size_t i = 0; i < curves.size(); ++i) curves[i].n_cells = cfg.sizes[i];
  } else {
    if (cfg.sizes.size() < 3) throw config_error("fs-scaling: need at least 3 system sizes");
    if (!cfg.h_sweep) throw config_error("fs-scaling: needs an h sweep");
    for (int n : cfg.sizes) {
      ExperimentConfig sub = cfg;
      sub.params.n_cells = n;
      char name[64];
      std::snprintf(name, sizeof(name), "fs_scan_N%d.csv", n);
      run_fs_scan(sub, io, name);
      CollapseCurve c;
      c.n_cells = n;
      for (double h : cfg.h_sweep->values()) {
        ModelParams p = sub.params;
        p.h = h;
        const auto f = fidelity(p, cfg.fit.direction, cfg.fit.delta);
        const double chi = std::max(0.0, -2.0 * std::log(std::max(f.value, 1e-300)) /
                                             (cfg.fit.delta * cfg.fit.delta));
        c.points.emplace_back(h, chi / n);
      }
      curves.push_back(std::move(c));
    }
  }

  for (const auto& c : curves) {
    double best = 0.0;
    for (const auto& [h, chi_per] : c.points) best = std::max(best, chi_per * c.n_cells);
    chimax_points.emplace_back(c.n_cells, best);
  }

  const auto collapse = fs_collapse(curves, cfg.fit.h_c, cfg.fit.nu_range);
  CsvWriter scan(io.file("collapse_scan.csv"), cfg, {"nu", "residual"});
  for (const auto& [nu, r] : collapse.scan) scan.row({nu, r});

  CsvWriter master(io.file("collapse_master.csv"), cfg, {"x_rescaled", "y", "n_cells"});
  for (const auto& c : curves) {
    double chi_max = 0.0;
    for (const auto& [h, chi_per] : c.points) chi_max = std::max(chi_max, chi_per);
    for (const auto& [h, chi_per] : c.points)
      master.row({std::pow(double(c.n_cells), collapse.nu_best) * (h - cfg.fit.h_c),
                  (chi_max - chi_per) / chi_per, double(c.n_cells)});
  }

  json fit;
  fit["config_hash"] = config_hash(cfg);
  fit["nu_best"] = collapse.nu_best;
  fit["collapse_residual"] = collapse.residual_best;
  if (chimax_points.size() >= 4) {  // the power-law fit needs four sizes
    double n_lo = 1e300, n_hi = 0;
    for (const auto& [n, chi] : chimax_points) {
      n_lo = std::min(n_lo, n);
      n_hi = std::max(n_hi, n);
    }
    const auto mu = power_law_fit(chimax_points, {0.5 * n_lo, 2.0 * n_hi});
    fit["mu"] = {{"exponent", mu.exponent},
                 {"amplitude", mu.amplitude},
                 {"std_error", mu.std_error},
                 {"residual", mu.residual},
                 {"window", {mu.window.first, mu.window.second}}};
    io.metadata["mu"] = mu.exponent;
  }
  write_json(io.file("fs_scaling_fit.json"), fit);
  io.metadata["nu_best"] = collapse.nu_best;
}

inline void run_concurrence(const ExperimentConfig& cfg, ExperimentIo& io) {
  if (!cfg.h_sweep) throw config_error("concurrence: needs an h sweep");
  const std::vector<double> alphas =
      cfg.alpha_sweep ? cfg.alpha_sweep->values() : std::vector<double>{cfg.params.alpha};
  const auto hs = cfg.h_sweep->values();
  CsvWriter csv(io.file("concurrence.csv"), cfg,
                {"alpha", "h", "C_intra", "C_inter", "dC_dalpha_intra"});
  const double da = 1e-3;  // central step for the alpha derivative
  struct Row {
    double c_intra, c_inter, dcda;
  };
  std::vector<Row> rows(alphas.size() * hs.size());
  parallel_for(alphas.size() * hs.size(), [&](std::size_t idx) {
    ModelParams p = cfg.params;
    p.alpha = alphas[idx / hs.size()];
    p.h = hs[idx % hs.size()];
    const auto mc = majorana_matrix(ground_state(p, cfg.branch));
    const double ci = concurrence(two_site_density_matrix(mc, 1, 2));
    const double ce = concurrence(two_site_density_matrix(mc, 2, 3));
    ModelParams pp = p, pm = p;
    pp.alpha += da;
    pm.alpha -= da;
    const double cp =
        concurrence(two_site_density_matrix(majorana_matrix(ground_state(pp, cfg.branch)), 1, 2));
    const double cm =
        concurrence(two_site_density_matrix(majorana_matrix(ground_state(pm, cfg.branch)), 1, 2));
    rows[idx] = {ci, ce, (cp - cm) / (2 * da)};
  });
  for (std::size_t i = 0; i < rows.size(); ++i)
    csv.row({alphas[i / hs.size()], hs[i % hs.size()], rows[i].c_intra, rows[i].c_inter,
             rows[i].dcda});
}

inline void run_entropy(const ExperimentConfig& cfg, ExperimentIo& io) {
  const int n_sites = cfg.params.n_sites();
  const int l_max = cfg.block_max.value_or(std::min(128, n_sites / 4));
  std::vector<int> sizes;
  for (int L = cfg.block_step; L <= l_max; L += cfg.block_step) sizes.push_back(L);
  if (sizes.size() < 4) throw config_error("entropy: need at least 4 block sizes");

  const auto curve = entropy_curve(ground_state(cfg.params, cfg.branch), sizes);
  CsvWriter csv(io.file("entropy.csv"), cfg, {"L", "S_bits"});
  for (std::size_t i = 0; i < sizes.size(); ++i) csv.row({double(sizes[i]), curve.entropies[i]});

  const std::pair<double, double> window =
      cfg.fit.window.value_or(std::pair<double, double>{sizes.front(), sizes.back()});
  const auto fit = central_charge_fit(curve, window);
  json report;
  report["config_hash"] = config_hash(cfg);
  report["central_charge"] = fit.exponent;
  report["std_error"] = fit.std_error;
  report["residual"] = fit.residual;
  report["intercept"] = fit.amplitude;
  report["window"] = {fit.window.first, fit.window.second};
  report["saturated"] = fit.saturated;
  write_json(io.file("entropy_fit.json"), report);
  io.metadata["central_charge"] = fit.exponent;
  io.metadata["saturated"] = fit.saturated;
}

inline void run_correlator(const ExperimentConfig& cfg, ExperimentIo& io) {
  if (cfg.r_range) {
    const auto [r_min, r_max] = *cfg.r_range;
    if (r_min < 0 || r_max < r_min) throw config_error("correlator: bad r range");
    const auto mc = majorana_matrix(ground_state(cfg.params, cfg.branch));
    CsvWriter csv(io.file("string_correlator.csv"), cfg, {"r", "corr_xx", "abs_corr_xx"});
    std::vector<double> values(r_max - r_min + 1);
    parallel_for(values.size(),
                 [&](std::size_t i) { values[i] = string_correlator_xx(mc, r_min + int(i)); });
    std::vector<std::pair<double, double>> pts;
    for (int r = r_min; r <= r_max; ++r) {
      const double c = values[r - r_min];
      csv.row({double(r), c, std::abs(c)});
      if (r > 0) pts.emplace_back(r, std::abs(c));
    }
    const std::pair<double, double> window =
        cfg.fit.window.value_or(std::pair<double, double>{std::max(1, r_min), r_max});
    const auto fit = power_law_fit(pts, window);
    json report;
    report["config_hash"] = config_hash(cfg);
    report["eta"] = -fit.exponent;
    report["exponent"] = fit.exponent;
    report["std_error"] = fit.std_error;
    report["residual"] = fit.residual;
    report["amplitude"] = fit.amplitude;
    report["window"] = {fit.window.first, fit.window.second};
    write_json(io.file("correlator_fit.json"), report);
    io.metadata["eta"] = -fit.exponent;
    return;
  }
  if (!cfg.alpha_sweep)
    throw config_error("correlator: needs either an r range or an alpha sweep");
  CsvWriter csv(io.file("two_site_correlators.csv"), cfg,
                {"alpha", "xx_intercell", "yy_intracell"});
  const auto alphas = cfg.alpha_sweep->values();
  std::vector<std::array<double, 2>> rows(alphas.size());
  parallel_for(alphas.size(), [&](std::size_t i) {
    ModelParams p = cfg.params;
    p.alpha = alphas[i];
    const auto mc = majorana_matrix(ground_state(p, cfg.branch));
    rows[i] = {two_site_correlators(mc, 2, 3).xx, two_site_correlators(mc, 1, 2).yy};
  });
  for (std::size_t i = 0; i < alphas.size(); ++i)
    csv.row({alphas[i], rows[i][0], rows[i][1]});
}

inline void run_magnetization(const ExperimentConfig& cfg, ExperimentIo& io) {
  if (!cfg.h_sweep) throw config_error("magnetization: needs an h sweep");
  const auto hs = cfg.h_sweep->values();
  CsvWriter csv(io.file("magnetization.csv"), cfg, {"h", "sigma_z", "chi"});
  for (double h : hs) {
    ModelParams p = cfg.params;
    p.h = h;
    csv.row({h, magnetization(p), susceptibility_at(p, h)});
  }

  // susceptibility-exponent fit around the pinned h_c = 0, with the same
  // symmetric fit on the reference Ising chain at its critical field 2J
  const std::pair<double, double> window =
      cfg.fit.window.value_or(std::pair<double, double>{1e-3, 1e-2});
  const auto grid = log_spaced(window.first, window.second, cfg.fit.points);
  const double chi_c = susceptibility_at(cfg.params, cfg.fit.h_c);
  std::vector<std::pair<double, double>> dev;
  CsvWriter gcsv(io.file("susceptibility_deviation.csv"), cfg,
                 {"abs_h_minus_hc", "abs_chi_minus_chic", "ising_abs_chi_minus_chic"});
  const double ising_hc = 2.0 * cfg.params.J;
  const double ising_chi_c = ising_susceptibility_abc(cfg.params.J, ising_hc, cfg.params.n_cells);
  std::vector<std::pair<double, double>> ising_dev;
  for (double d : grid) {
    const double chi = susceptibility_at(cfg.params, cfg.fit.h_c + d);
    dev.emplace_back(d, std::abs(chi - chi_c));
    const double ising_sym =
        0.5 * (ising_susceptibility_abc(cfg.params.J, ising_hc - d, cfg.params.n_cells) +
               ising_susceptibility_abc(cfg.params.J, ising_hc + d, cfg.params.n_cells));
    ising_dev.emplace_back(d, std::abs(ising_sym - ising_chi_c));
    gcsv.row({d, dev.back().second, ising_dev.back().second});
  }
  const auto gamma = power_law_fit(dev, window);
  const auto gamma_ising = power_law_fit(ising_dev, window);
  json report;
  report["config_hash"] = config_hash(cfg);
  report["gamma"] = gamma.exponent;
  report["gamma_std_error"] = gamma.std_error;
  report["gamma_ising"] = gamma_ising.exponent;
  report["slope_delta"] = std::abs(gamma.exponent - gamma_ising.exponent);
  report["window"] = {window.first, window.second};
  report["h_c"] = cfg.fit.h_c;
  write_json(io.file("susceptibility_fit.json"), report);
  io.metadata["gamma"] = gamma.exponent;
  io.metadata["gamma_ising"] = gamma_ising.exponent;
}

inline void run_oracle_validate(const ExperimentConfig& cfg, ExperimentIo& io) {
  CsvWriter csv(io.file("oracle_validate.csv"), cfg,
                {"check", "value_exact", "value_ed", "abs_delta", "tolerance", "pass"});
  bool all_pass = true;
  int check_id = 0;
  auto emit = [&](double exact, double ed, double tol) {
    const double delta = std::abs(exact - ed);
    const bool pass = delta < tol;
    all_pass = all_pass && pass;
    csv.row({double(++check_id), exact, ed, delta, tol, double(pass)});
  };

  // PBC closed form against the odd-parity sector across an alpha sweep
  for (int i = 0; i <= 10; ++i) {
    ModelParams p = cfg.params;
    p.n_cells = 4;
    p.bc = Boundary::PBC;
    p.alpha = -2.0 + 0.4 * i;
    p.h = 0.8;
    ModelParams spin = p;
    spin.bc = Boundary::ABC;
    emit(ground_state(p).energy, ed_ground_state(spin, Sector::odd).energy, 1e-10);
  }
  // ABC closed form against the even sector
  for (int n : {2, 4, 6}) {
    ModelParams p = cfg.params;
    p.n_cells = n;
    p.bc = Boundary::ABC;
    p.alpha = 1.0;
    p.h = 0.5;
    emit(ground_state(p).energy, ed_ground_state(p, Sector::even).energy, 1e-10);
  }
  // four-site spectra as multisets
  {
    ModelParams p = cfg.params;
    p.n_cells = 2;
    p.alpha = 1.3;
    p.h = 0.7;
    p.bc = Boundary::ABC;
    auto w = spectra_n4(p);
    std::vector<double> a(w.begin(), w.end());
    std::sort(a.begin(), a.end());
    const auto ed = ed_full_spectrum(p);
    double worst = 0.0;
    for (int i = 0; i < 16; ++i) worst = std::max(worst, std::abs(a[i] - ed[i]));
    emit(worst, 0.0, 1e-10);
  }
  // observables at six cells
  {
    ModelParams p = cfg.params;
    p.n_cells = 6;
    p.bc = Boundary::ABC;
    p.alpha = 1.0;
    p.h = 0.3;
    const auto gs = ground_state(p);
    const auto mc = majorana_matrix(gs);
    const auto ed = ed_ground_state(p, Sector::even);
    emit(two_site_correlators(mc, 1, 2).yy, ed_pauli_correlator(ed, 'y', 1, 'y', 2).real(),
         1e-8);
    emit(two_site_correlators(mc, 2, 3).xx, ed_pauli_correlator(ed, 'x', 2, 'x', 3).real(),
         1e-8);
    emit(string_correlator_xx(mc, 2), ed_string_correlator_xx(ed, 2, 7), 1e-8);
    emit(block_entropy(mc, 4), ed_block_entropy(ed, 4), 1e-6);
    emit(magnetization(gs), ed_magnetization(ed), 1e-8);
  }
  // Ising reference energies
  emit(ising_ground_energy(cfg.params.J, 1.0, 4, Boundary::ABC),
       ed_ising_ground_state(cfg.params.J, 1.0, 4, Sector::even).energy, 1e-10);
  emit(ising_ground_energy(cfg.params.J, 1.0, 4, Boundary::PBC),
       ed_ising_ground_state(cfg.params.J, 1.0, 4, Sector::odd).energy, 1e-10);

  io.metadata["all_pass"] = all_pass;
  if (!all_pass) throw numerical_error("oracle-validate: a cross-check exceeded its tolerance");
}

inline void run_ising_check(const ExperimentConfig& cfg, ExperimentIo& io) {
  const SweepSpec sweep = cfg.h_sweep.value_or(SweepSpec{1.0, 0, 1});
  const bool with_oracle = cfg.params.n_sites() <= kMaxEDSites;
  std::vector<std::string> cols{"h", "e_abc", "e_pbc"};
  if (with_oracle) {
    cols.insert(cols.end(), {"e_abc_ed", "e_pbc_ed", "abc_delta", "pbc_delta"});
  }
  CsvWriter csv(io.file("ising_check.csv"), cfg, cols);
  double max_delta = 0.0;
  for (double h : sweep.values()) {
    const double e_abc = ising_ground_energy(cfg.params.J, h, cfg.params.n_cells, Boundary::ABC);
    const double e_pbc =
        (h > 0 && h < 2 * cfg.params.J)
            ? ising_ground_energy(cfg.params.J, h, cfg.params.n_cells, Boundary::PBC)
            : std::numeric_limits<double>::quiet_NaN();
    std::vector<double> row{h, e_abc, e_pbc};
    if (with_oracle) {
      const double abc_ed =
          ed_ising_ground_state(cfg.params.J, h, cfg.params.n_cells, Sector::even).energy;
      const double pbc_ed =
          ed_ising_ground_state(cfg.params.J, h, cfg.params.n_cells, Sector::odd).energy;
      const double d1 = std::abs(e_abc - abc_ed);
      const double d2 = std::isnan(e_pbc) ? 0.0 : std::abs(e_pbc - pbc_ed);
      row.insert(row.end(), {abc_ed, pbc_ed, d1, d2});
      max_delta = std::max({max_delta, d1, d2});
    }
    csv.row(row);
  }
  if (with_oracle) io.metadata["max_abs_delta"] = max_delta;
}

}  // namespace detail

struct ExperimentResult {
  json metadata;
  std::vector<std::string> outputs;
};

/// Runs one experiment end to end: computes the requested quantities and
/// writes CSV data, a JSON metadata file, and a JSON fit report where the
/// experiment performs a fit. Output bytes are deterministic for a fixed
/// config and build.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.params.validate();
  if (cfg.threads > 0) set_max_threads(cfg.threads);
  const auto t0 = std::chrono::steady_clock::now();

  detail::ExperimentIo io(cfg);
  const std::string& name = cfg.experiment;
  if (name == "gs-energy")
    detail::run_gs_energy(cfg, io);
  else if (name == "spectrum")
    detail::run_spectrum(cfg, io);
  else if (name == "gap")
    detail::run_gap(cfg, io);
  else if (name == "fidelity-map")
    detail::run_fidelity_map(cfg, io);
  else if (name == "fs-scan")
    detail::run_fs_scan(cfg, io);
  else if (name == "fs-scaling")
    detail::run_fs_scaling(cfg, io);
  else if (name == "concurrence")
    detail::run_concurrence(cfg, io);
  else if (name == "entropy")
    detail::run_entropy(cfg, io);
  else if (name == "correlator")
    detail::run_correlator(cfg, io);
  else if (name == "magnetization")
    detail::run_magnetization(cfg, io);
  else if (name == "oracle-validate")
    detail::run_oracle_validate(cfg, io);
  else if (name == "ising-check")
    detail::run_ising_check(cfg, io);
  else
    throw config_error("unknown experiment: " + name);

  const auto t1 = std::chrono::steady_clock::now();
  io.metadata["wall_time_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  io.metadata["outputs"] = io.outputs;
  detail::write_json(io.dir / (name + "_meta.json"), io.metadata);

  ExperimentResult result;
  result.metadata = io.metadata;
  result.outputs = io.outputs;
  return result;
}

}  // namespace compass
