// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <istream>
#include <string>
#include <vector>

namespace nomp2 {

/// Dense chemist-notation (pq|rs) tensor over spatial orbitals.
class Eri {
 public:
  Eri() = default;
  explicit Eri(int n) : n_(n), v_(static_cast<size_t>(n) * n * n * n, 0.0) {}

  int n() const { return n_; }
  double operator()(int p, int q, int r, int s) const { return v_[index(p, q, r, s)]; }
  double& at(int p, int q, int r, int s) { return v_[index(p, q, r, s)]; }

  /// Writes value into all 8 symmetry-equivalent slots.
  void set_symmetric(int p, int q, int r, int s, double value);

  /// Largest deviation from 8-fold permutational symmetry.
  double symmetry_error() const;

 private:
  size_t index(int p, int q, int r, int s) const {
    return ((static_cast<size_t>(p) * n_ + q) * n_ + r) * n_ + s;
  }
  int n_ = 0;
  std::vector<double> v_;
};

struct MolecularIntegrals {
  int n_spatial = 0;
  double e_core = 0.0;
  Eigen::MatrixXd h1;
  Eri eri;
  int n_electrons = 0;
  int ms2 = 0;
};

/// 0-based spatial orbital indices.
struct ActiveSpaceSpec {
  std::vector<int> frozen_occupied;
  std::vector<int> deleted_virtual;
};

/// Spin-orbital view; spatial m maps to 2m (alpha) and 2m+1 (beta).
struct SpinIntegrals {
  int n_spin = 0;
  Eigen::MatrixXd h1s;
  Eri eri;

  /// Coefficient of a+_p a+_q a_r a_s in H = sum h1s a+a + 1/2 sum v2s a+a+aa.
  double v2s(int p, int q, int r, int s) const {
    if ((p & 1) != (s & 1) || (q & 1) != (r & 1)) return 0.0;
    return eri(p >> 1, s >> 1, q >> 1, r >> 1);
  }
};

MolecularIntegrals parse_fcidump(std::istream& in);
MolecularIntegrals read_fcidump(const std::string& path);

/// Checks the documented invariants; throws on violation.
void validate(const MolecularIntegrals& mi);

MolecularIntegrals freeze_active_space(const MolecularIntegrals& mi, const ActiveSpaceSpec& spec);

SpinIntegrals spin_orbitalize(const MolecularIntegrals& mi);

/// eps_p = h_pp + sum_{i < n_electrons} (h_piip - h_pipi). Appends a message to
/// warnings (when given) for non-aufbau orderings.
Eigen::VectorXd orbital_energies(const SpinIntegrals& si, int n_electrons,
                                 std::vector<std::string>* warnings = nullptr);

/// One-body part of V(theta) = H - F(theta); the two-body part is si.eri itself.
struct Perturbation {
  Eigen::MatrixXd t;      // N x N
  Eigen::MatrixXd u;      // exp(theta)
};

/// Throws if theta is not antisymmetric to 1e-12.
Perturbation build_perturbation(const SpinIntegrals& si, const Eigen::VectorXd& eps,
                                const Eigen::MatrixXd& theta);

}  // namespace nomp2
