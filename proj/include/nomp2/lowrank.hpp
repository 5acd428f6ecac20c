// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "nomp2/chem_io.hpp"

namespace nomp2 {

/// U_l [sum_p d_p n_p + sum_pq d_pq n_p n_q] U_l^dagger
struct MeasurementGroup {
  int label = 0;
  Eigen::MatrixXd rotation;   // M x M spatial, det +1
  Eigen::VectorXd linear;     // N, zero for two-body groups
  Eigen::MatrixXd quadratic;  // N x N, zero for group 0
};

struct FactorizedPerturbation {
  std::vector<MeasurementGroup> groups;
  double truncation_tol = 1e-12;
  /// Frobenius norm of the coefficient-space residual (supermatrix plus one-body).
  double reconstruction_error = 0.0;
};

/// Lifts an M x M spatial matrix to N = 2M interleaved spin orbitals.
Eigen::MatrixXd spin_lift(const Eigen::MatrixXd& spatial);

/// Spatial block of a spin-lifted matrix; throws unless both spin blocks agree
/// and the cross-spin blocks vanish to 1e-10.
Eigen::MatrixXd spatial_block(const Eigen::MatrixXd& spin);

FactorizedPerturbation factorize(const Eigen::MatrixXd& t, const Eri& eri, double tol = 1e-12);

/// Only group 0 depends on theta; this rebuilds it in place.
void refactor_one_body(FactorizedPerturbation& fp, const Eigen::MatrixXd& t, const Eri& eri);

/// coeff(b) = sum_p d_p b_p + sum_pq d_pq b_p b_q
double group_coefficient(const MeasurementGroup& g, uint32_t bits);

/// group_coefficient for every bitstring of n_qubits.
std::vector<double> group_coefficient_table(const MeasurementGroup& g, int n_qubits);

}  // namespace nomp2
