// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nomp2/chem_io.hpp"
#include "nomp2/circuit.hpp"
#include "nomp2/lowrank.hpp"
#include "nomp2/simulator.hpp"

namespace nomp2 {

/// Unique restricted occupied-virtual parameters. pairs hold 0-based alpha
/// spin orbitals (p occupied, q virtual); each parameter fills
/// theta_pq = -theta_qp = theta_{p+1,q+1} = -theta_{q+1,p+1}.
struct ThetaParams {
  std::vector<double> unique;
  std::vector<std::pair<int, int>> pairs;
};

ThetaParams make_theta(int n_spin, int n_electrons);
Eigen::MatrixXd expand_theta(const ThetaParams& t, int n_spin);

/// 0-based spin orbitals, i < j < n_electrons <= a < b.
struct DoubleExcitationIndex {
  int i, j, a, b;
  bool spin_conserving() const;
  auto operator<=>(const DoubleExcitationIndex&) const = default;
};

std::vector<DoubleExcitationIndex> enumerate_doubles(int n_spin, int n_electrons);

enum class EstimatorMode { kExact, kShots };

struct EstimatorConfig {
  EstimatorMode mode = EstimatorMode::kExact;
  uint64_t shots = 100000;
  std::optional<NoiseModel> noise;
  bool postselect = false;
  double tol = 1e-12;
  uint64_t seed = 12345;
  /// Noisy shot mode splits each circuit's shots over this many trajectories.
  int trajectories = 100;
  /// Skips doubles whose residual vanishes by spin symmetry.
  bool skip_spin_forbidden = false;
};

struct EnergyBreakdown {
  double e0 = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double total = 0.0;  // e0 + e1 + e2, electronic
  double variance = 0.0;
  double e_core = 0.0;
  std::vector<double> theta;

  // Diagnostics.
  double e1_variance = 0.0;
  std::vector<double> group_kept_fraction;  // set A, per group
  double kept_fraction_mean = 1.0;          // over all executed circuits
  double kept_fraction_a = 1.0;             // set A circuits
  double kept_fraction_b = 1.0;             // set B circuits
  std::vector<DoubleExcitationIndex> doubles;
  std::vector<double> residuals;
  std::vector<double> residual_variances;
  std::vector<std::string> warnings;
  long circuits = 0;

  double total_with_core() const { return total + e_core; }
};

/// Fixed per-molecule data: integrals, orbital energies and the theta-free
/// two-body measurement groups with their compiled basis-change circuits.
class Omp2Problem {
 public:
  Omp2Problem(const MolecularIntegrals& mi, double tol = 1e-12);

  int n_spin() const { return si_.n_spin; }
  int n_electrons() const { return n_electrons_; }
  double e_core() const { return e_core_; }
  const SpinIntegrals& spin_integrals() const { return si_; }
  const Eigen::VectorXd& eps() const { return eps_; }
  const std::vector<DoubleExcitationIndex>& doubles() const { return doubles_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  double tol() const { return tol_; }

  /// Measurement groups at theta (group 0 rebuilt).
  FactorizedPerturbation factorization(const Eigen::MatrixXd& theta) const;
  const FactorizedPerturbation& two_body_factorization() const { return fp_; }
  /// Basis-change circuit for group l >= 1, compile(U_l^T).
  const Circuit& group_circuit(int l) const { return group_circuits_.at(l); }
  int group_count() const { return static_cast<int>(fp_.groups.size()); }

  ThetaParams zero_theta() const { return make_theta(si_.n_spin, n_electrons_); }

 private:
  SpinIntegrals si_;
  Eigen::VectorXd eps_;
  int n_electrons_;
  double e_core_;
  double tol_;
  FactorizedPerturbation fp_;
  std::vector<Circuit> group_circuits_;
  std::vector<DoubleExcitationIndex> doubles_;
  std::vector<std::string> warnings_;
};

/// Set A circuit for group l: prep + compile(U(theta)) + compile(U_l^T).
Circuit set_a_circuit(const Omp2Problem& pb, const Eigen::MatrixXd& u, const FactorizedPerturbation& fp, int l);
/// Set B circuit: prep + double_excitation(omega) + compile(U(theta)) + compile(U_l^T).
Circuit set_b_circuit(const Omp2Problem& pb, const Eigen::MatrixXd& u, const FactorizedPerturbation& fp, int l,
                      const DoubleExcitationIndex& d, double omega);

struct Estimates {
  Estimate e1;
  std::vector<double> kept;
};

/// E1 from set A. kept fractions per group returned alongside.
Estimates estimate_e1(const Omp2Problem& pb, const ThetaParams& theta, const EstimatorConfig& cfg);

/// r_ij^ab from the two set-B expectations and the supplied E1.
Estimate estimate_residual(const Omp2Problem& pb, const DoubleExcitationIndex& d, const ThetaParams& theta,
                           const Estimate& e1, const EstimatorConfig& cfg);

EnergyBreakdown mp2_energy(const Omp2Problem& pb, const ThetaParams& theta, const EstimatorConfig& cfg);

struct OptimizerSettings {
  int max_iterations = 200;
  double energy_tol = 1e-8;
  double gradient_tol = 1e-6;
  double fd_step = 1e-4;
  /// Simplex edge for the derivative-free path.
  double simplex_step = 0.05;
};

struct OptimizeResult {
  ThetaParams theta;
  EnergyBreakdown energy;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
};

/// Central-difference gradient of the exact-mode energy.
Eigen::VectorXd energy_gradient(const Omp2Problem& pb, const ThetaParams& theta, const EstimatorConfig& cfg,
                                double step, int* evaluations = nullptr);

/// Quasi-Newton (BFGS) in exact mode, Nelder-Mead in shot mode. Starts at zero.
OptimizeResult optimize(const Omp2Problem& pb, const EstimatorConfig& cfg, const OptimizerSettings& opt = {});

/// Total circuit count (1 + 2D) G for one energy evaluation.
long circuit_count(const Omp2Problem& pb, bool skip_spin_forbidden = false);

}  // namespace nomp2
