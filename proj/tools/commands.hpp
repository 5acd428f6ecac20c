// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nomp2/chem_io.hpp"
#include "nomp2/error.hpp"
#include "nomp2/omp2.hpp"

namespace nomp2::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kFixture = 3,
  kConvergence = 4,
  kCapacity = 5,
};

int exit_code_for(ErrorKind kind);

struct RunConfig {
  std::string fixture;      // FCIDUMP path
  std::string fixture_dir;  // directory with reference.json
  EstimatorMode mode = EstimatorMode::kExact;
  uint64_t shots = 100000;
  std::string noise = "none";
  std::string noise_file;
  bool postselect = false;
  double tol = 1e-12;
  uint64_t seed = 12345;
  int jobs = 1;
  std::string format = "csv";
  std::vector<double> theta;  // shot-mode evaluation point; empty means optimize exactly first
  bool shot_optimize = false;
  int trajectories = 200;
  std::vector<int> frozen;
  std::vector<int> deleted;
  bool skip_spin_forbidden = false;
};

inline constexpr const char* kCurveSchema = "# nomp2-curve schema 1";
inline constexpr const char* kNoiseSchema = "# nomp2-noise-study schema 1";
inline constexpr const char* kResourceSchema = "# nomp2-resources schema 1";

int cmd_energy(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_curve(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_resources(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_noise_study(const RunConfig& cfg, std::ostream& out, std::ostream& log);

}  // namespace nomp2::cli
