// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "commands.hpp"
#include "nomp2/error.hpp"
#include "nomp2/simulator.hpp"

namespace {

using nomp2::cli::RunConfig;

void add_common(CLI::App* sub, RunConfig& cfg, std::string& mode, std::string& out_path) {
  sub->add_option("--mode", mode, "exact or shots")->check(CLI::IsMember({"exact", "shots"}));
  sub->add_option("--shots", cfg.shots, "shots per circuit");
  sub->add_option("--noise", cfg.noise, "noise preset name, or none");
  sub->add_option("--noise-file", cfg.noise_file, "noise preset JSON");
  sub->add_flag("--postselect", cfg.postselect, "keep only shots with the electron count");
  sub->add_option("--tol", cfg.tol, "factorization truncation tolerance");
  sub->add_option("--seed", cfg.seed, "base RNG seed");
  sub->add_option("--jobs", cfg.jobs, "worker threads");
  sub->add_option("--out", out_path, "output file (default stdout)");
  sub->add_option("--format", cfg.format, "csv or json");
  sub->add_option("--trajectories", cfg.trajectories, "noise trajectories per circuit");
  sub->add_flag("--skip-spin-forbidden", cfg.skip_spin_forbidden, "skip doubles that change S_z");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orbital-optimized MP2 on simulated quantum hardware"};
  app.require_subcommand(1);
  RunConfig cfg;
  cfg.seed = nomp2::default_seed();
  std::string mode = "exact";
  std::string out_path;

  auto* energy = app.add_subcommand("energy", "MP2 energy for one FCIDUMP");
  energy->add_option("--fixture", cfg.fixture, "FCIDUMP file")->required();
  energy->add_option("--theta", cfg.theta, "rotation parameters for shot mode")->delimiter(',');
  energy->add_flag("--shot-optimize", cfg.shot_optimize, "optimize in shot mode with Nelder-Mead");
  energy->add_option("--frozen", cfg.frozen, "frozen occupied spatial orbitals (0-based)")->delimiter(',');
  energy->add_option("--deleted", cfg.deleted, "deleted virtual spatial orbitals (0-based)")->delimiter(',');
  add_common(energy, cfg, mode, out_path);

  auto* curve = app.add_subcommand("curve", "dissociation curve over a fixture directory");
  curve->add_option("--fixture-dir", cfg.fixture_dir, "directory with reference.json")->required();
  add_common(curve, cfg, mode, out_path);

  auto* resources = app.add_subcommand("resources", "qubit, parameter, depth and circuit counts");
  resources->add_option("--fixture", cfg.fixture, "FCIDUMP file")->required();
  resources->add_option("--frozen", cfg.frozen, "frozen occupied spatial orbitals (0-based)")->delimiter(',');
  resources->add_option("--deleted", cfg.deleted, "deleted virtual spatial orbitals (0-based)")->delimiter(',');
  add_common(resources, cfg, mode, out_path);

  auto* noise = app.add_subcommand("noise-study", "raw vs post-selected energies and fidelities");
  noise->add_option("--fixture-dir", cfg.fixture_dir, "directory with reference.json")->required();
  add_common(noise, cfg, mode, out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : nomp2::cli::kUsage;
  }
  cfg.mode = mode == "shots" ? nomp2::EstimatorMode::kShots : nomp2::EstimatorMode::kExact;

  std::ostringstream buffer;
  int code = nomp2::cli::kOk;
  try {
    if (*energy) code = nomp2::cli::cmd_energy(cfg, buffer, std::cerr);
    else if (*curve) code = nomp2::cli::cmd_curve(cfg, buffer, std::cerr);
    else if (*resources) code = nomp2::cli::cmd_resources(cfg, buffer, std::cerr);
    else code = nomp2::cli::cmd_noise_study(cfg, buffer, std::cerr);
  } catch (const nomp2::Error& e) {
    std::cerr << "nomp2: " << e.what() << '\n';
    return nomp2::cli::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "nomp2: " << e.what() << '\n';
    return nomp2::cli::kFailure;
  }
  if (out_path.empty()) {
    std::cout << buffer.str();
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      std::cerr << "nomp2: cannot write " << out_path << '\n';
      return nomp2::cli::kFailure;
    }
    f << buffer.str();
  }
  return code;
}
