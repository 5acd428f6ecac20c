// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nomp2/circuit.hpp"

namespace nomp2 {

/// Keyed stream generator: mt19937_64 engines seeded through a splitmix64 mix of
/// (seed, keys...). Splitting derives an independent child stream from a key.
class Rng {
 public:
  explicit Rng(uint64_t seed, std::initializer_list<uint64_t> keys = {});

  Rng split(uint64_t key) const;
  Rng split(std::initializer_list<uint64_t> keys) const;

  uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  uint64_t below(uint64_t n);
  uint64_t binomial(uint64_t n, double p);
  uint64_t key() const { return key_; }

 private:
  uint64_t key_;
  std::mt19937_64 engine_;
};

/// Default seed; the NOMP2_SEED environment variable overrides it.
uint64_t default_seed();

struct StateVector {
  int n_qubits = 0;
  Eigen::VectorXcd amplitudes;

  static StateVector basis(int n_qubits, uint32_t bits = 0);
  double norm() const { return amplitudes.norm(); }
};

struct NoiseModel {
  std::string name = "none";
  double p1 = 0.0;
  double p2 = 0.0;
  double p_readout = 0.0;
  uint64_t seed = 0;

  bool gate_noise() const { return p1 > 0.0 || p2 > 0.0; }
  void validate() const;
};

/// Reads a preset by name from a JSON preset file.
NoiseModel load_noise_preset(const std::string& path, const std::string& name);
std::vector<std::string> list_noise_presets(const std::string& path);
std::string default_noise_preset_path();

struct ShotTable {
  int n_qubits = 0;
  std::map<uint32_t, uint64_t> counts;  // basis index, bit q = qubit q
  uint64_t shots = 0;
  bool postselected = false;
  double kept_fraction = 1.0;

  uint64_t kept() const;
};

/// Bitstring text with qubit 0 leftmost.
std::string bitstring(uint32_t bits, int n_qubits);
uint32_t parse_bitstring(const std::string& s);

void apply_gate(StateVector& s, const Gate& g);

/// One trajectory. With gate noise, after every gate a uniformly random
/// non-identity Pauli hits its qubits with probability p1 (1q) or p2 (2q).
StateVector run(const Circuit& c, const StateVector& initial, const NoiseModel* noise = nullptr,
                Rng* rng = nullptr);

/// Multinomial sampling of |amplitudes|^2, then independent readout flips.
ShotTable sample(const StateVector& s, uint64_t shots, const NoiseModel* noise, Rng& rng);
ShotTable sample_probabilities(const std::vector<double>& probs, int n_qubits, uint64_t shots,
                               const NoiseModel* noise, Rng& rng);

/// Keeps Hamming weight n_electrons; an all-rejected table has kept() == 0.
ShotTable postselect(const ShotTable& t, int n_electrons);

struct Estimate {
  double value = 0.0;
  double variance = 0.0;
};

/// Mean of coeff over kept shots and (sample variance)/shots. Throws on an empty table.
Estimate expectation_with_variance(const ShotTable& t, const std::vector<double>& coeff);

/// Exact expectation of a diagonal coefficient table.
double exact_expectation(const StateVector& s, const std::vector<double>& coeff);

struct FidelityEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int n_traj = 0;
  std::vector<double> fidelity;  // per trajectory, raw overlap |<ideal|traj>|^2
  std::vector<double> weight;    // per trajectory, projection probability (1 when raw)
};

/// Mean |<ideal|traj>|^2. With postselect_n, both states are projected onto
/// the weight-n subspace and the overlaps are averaged with the projection
/// probability as weight. Trajectory t uses stream rng.split(t).
FidelityEstimate trajectory_fidelity(const StateVector& ideal, const Circuit& c, const StateVector& initial,
                                     const NoiseModel& noise, int n_traj, std::optional<int> postselect_n,
                                     const Rng& rng);

}  // namespace nomp2
