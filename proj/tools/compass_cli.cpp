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

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "compass/experiments.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string output_dir;
  int threads = 0;
  std::uint64_t seed = 0;
  double J = 1.0, alpha = 1.0, beta = 1.0, h = 0.0;
  int n_cells = 8;
  std::string bc = "ABC";
  double alpha_start = 0, alpha_stop = 0;
  int alpha_count = 0;
  double h_start = 0, h_stop = 0;
  int h_count = 0;
  std::vector<int> sizes;
  int r_min = -1, r_max = -1;
  int L_step = 0, L_max = 0;
  std::vector<double> window;
  double delta = 1e-4;
  std::string direction;
  double h_c = 0.0;
  int fit_points = 0;
  std::string branch;
  std::vector<std::string> curves;
};

// every experiment shares one option set; only flags the user actually passed
// override the config file
void add_options(CLI::App* cmd, CliOptions& o) {
  cmd->set_help_flag("--help", "print help");  // frees -h / --h for the field
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--out", o.output_dir, "output directory");
  cmd->add_option("--threads", o.threads, "worker thread cap");
  cmd->add_option("--seed", o.seed, "seed reserved for synthetic-data fit tooling");
  cmd->add_option("--J", o.J, "coupling energy");
  cmd->add_option("--alpha", o.alpha, "y-bond coupling");
  cmd->add_option("--beta", o.beta, "odd-bond mixing");
  cmd->add_option("--h", o.h, "transverse field");
  cmd->add_option("--n-cells", o.n_cells, "number of two-site cells");
  cmd->add_option("--bc", o.bc, "boundary condition: ABC or PBC");
  cmd->add_option("--alpha-start", o.alpha_start, "alpha sweep start");
  cmd->add_option("--alpha-stop", o.alpha_stop, "alpha sweep stop");
  cmd->add_option("--alpha-count", o.alpha_count, "alpha sweep point count");
  cmd->add_option("--h-start", o.h_start, "h sweep start");
  cmd->add_option("--h-stop", o.h_stop, "h sweep stop");
  cmd->add_option("--h-count", o.h_count, "h sweep point count");
  cmd->add_option("--sizes", o.sizes, "system sizes for fs-scaling");
  cmd->add_option("--r-min", o.r_min, "string correlator minimum distance");
  cmd->add_option("--r-max", o.r_max, "string correlator maximum distance");
  cmd->add_option("--L-step", o.L_step, "entropy block-size step");
  cmd->add_option("--L-max", o.L_max, "entropy maximum block size");
  cmd->add_option("--window", o.window, "fit window (two values)")->expected(2);
  cmd->add_option("--delta", o.delta, "fidelity step");
  cmd->add_option("--direction", o.direction, "fidelity direction: alpha or h");
  cmd->add_option("--h-c", o.h_c, "pinned critical field for the gamma fit");
  cmd->add_option("--fit-points", o.fit_points, "log-grid points for the gamma fit");
  cmd->add_option("--branch", o.branch, "zero-field degeneracy branch: field or beta");
  cmd->add_option("--curves", o.curves, "fs-scan CSV files consumed by fs-scaling");
}

compass::json build_config(const CLI::App& cmd, const CliOptions& o,
                           const std::string& experiment) {
  compass::json j;
  if (cmd.count("--config")) {
    std::ifstream in(o.config_path);
    if (!in) throw compass::config_error("cannot read config file " + o.config_path);
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw compass::config_error(std::string("config parse failure: ") + e.what());
    }
  }
  j["experiment"] = experiment;
  auto set = [&](const char* flag, auto&& apply) {
    if (cmd.count(flag)) apply();
  };
  set("--J", [&] { j["params"]["J"] = o.J; });
  set("--alpha", [&] { j["params"]["alpha"] = o.alpha; });
  set("--beta", [&] { j["params"]["beta"] = o.beta; });
  set("--h", [&] { j["params"]["h"] = o.h; });
  set("--n-cells", [&] { j["params"]["n_cells"] = o.n_cells; });
  set("--bc", [&] { j["params"]["bc"] = o.bc; });
  set("--alpha-start", [&] { j["sweep"]["alpha"]["start"] = o.alpha_start; });
  set("--alpha-stop", [&] { j["sweep"]["alpha"]["stop"] = o.alpha_stop; });
  set("--alpha-count", [&] { j["sweep"]["alpha"]["count"] = o.alpha_count; });
  set("--h-start", [&] { j["sweep"]["h"]["start"] = o.h_start; });
  set("--h-stop", [&] { j["sweep"]["h"]["stop"] = o.h_stop; });
  set("--h-count", [&] { j["sweep"]["h"]["count"] = o.h_count; });
  set("--sizes", [&] { j["sweep"]["sizes"] = o.sizes; });
  set("--r-min", [&] { j["sweep"]["r"]["min"] = o.r_min; });
  set("--r-max", [&] { j["sweep"]["r"]["max"] = o.r_max; });
  set("--L-step", [&] { j["sweep"]["L"]["step"] = o.L_step; });
  set("--L-max", [&] { j["sweep"]["L"]["max"] = o.L_max; });
  set("--window", [&] { j["fit"]["window"] = o.window; });
  set("--delta", [&] { j["fit"]["delta"] = o.delta; });
  set("--direction", [&] { j["fit"]["direction"] = o.direction; });
  set("--h-c", [&] { j["fit"]["h_c"] = o.h_c; });
  set("--fit-points", [&] { j["fit"]["points"] = o.fit_points; });
  set("--branch", [&] { j["fit"]["branch"] = o.branch; });
  set("--curves", [&] { j["curves"] = o.curves; });
  set("--out", [&] { j["output"] = o.output_dir; });
  set("--seed", [&] { j["seed"] = o.seed; });
  set("--threads", [&] { j["threads"] = o.threads; });
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact solver and phase-transition toolkit for the transverse-field "
               "compass chain"};
  app.require_subcommand(1);

  const std::vector<std::string> experiments{
      "gs-energy",   "spectrum", "gap",        "fidelity-map",  "fs-scan",
      "fs-scaling",  "concurrence", "entropy", "correlator",    "magnetization",
      "oracle-validate", "ising-check"};

  CliOptions options;
  std::vector<CLI::App*> commands;
  for (const auto& name : experiments) {
    CLI::App* cmd = app.add_subcommand(name, "run the " + name + " experiment");
    add_options(cmd, options);
    commands.push_back(cmd);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t i = 0; i < commands.size(); ++i) {
      if (commands[i]->parsed()) {
        const compass::json j = build_config(*commands[i], options, experiments[i]);
        const auto cfg = compass::parse_config(j);
        const auto result = compass::run_experiment(cfg);
        std::cout << result.metadata.dump(2) << std::endl;
        return 0;
      }
    }
  } catch (const std::exception& e) {
    compass::json err;
    err["error"] = e.what();
    const int code = compass::exit_code_for(e);
    err["type"] = code == 2   ? "config"
                  : code == 3 ? "numerical-consistency"
                  : code == 4 ? "size-limit"
                              : "internal";
    std::cerr << err.dump() << std::endl;
    return code;
  }
  return 1;
}
