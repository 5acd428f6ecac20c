// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nomp2/chem_io.hpp"

namespace nomp2 {

using cplx = std::complex<double>;

/// Product of ladder operators, applied right to left. Indices are 0-based
/// spin orbitals; `second` is true for a creation operator.
struct FermionTerm {
  double coefficient = 1.0;
  std::vector<std::pair<int, bool>> ladder;
};

using FermionOperator = std::vector<FermionTerm>;

/// Pauli letters packed as bit masks: X on q iff x bit q, Z iff z bit q, Y iff both.
struct PauliKey {
  uint32_t x = 0;
  uint32_t z = 0;
  auto operator<=>(const PauliKey&) const = default;
};

class QubitOperator {
 public:
  static constexpr double kDropTol = 1e-14;

  QubitOperator() = default;
  static QubitOperator identity(cplx c = 1.0);
  static QubitOperator single(char letter, int qubit, cplx c = 1.0);

  const std::map<PauliKey, cplx>& terms() const { return terms_; }
  void add_term(PauliKey k, cplx c);

  QubitOperator& operator+=(const QubitOperator& o);
  QubitOperator operator+(const QubitOperator& o) const;
  QubitOperator operator*(const QubitOperator& o) const;
  QubitOperator operator*(cplx c) const;

  /// Drops coefficients below kDropTol.
  void simplify();

  /// "0.5 X0 X1 + ..." style rendering, deterministic order.
  std::string str(int n_qubits) const;

 private:
  std::map<PauliKey, cplx> terms_;
};

/// Letters for a Pauli key over n qubits, qubit 0 leftmost.
std::string pauli_letters(PauliKey k, int n_qubits);

QubitOperator jw_map(const FermionOperator& op, int n_modes);

using CMatrix = Eigen::MatrixXcd;

/// Dense matrix in the computational basis; basis index bit q is qubit q.
CMatrix operator_matrix(const QubitOperator& op, int n_qubits);

/// P M P with P projecting onto Hamming weight n_electrons.
CMatrix apply_number_postselection_projector(const CMatrix& m, int n_electrons);

/// Basis indices of Hamming weight n over n_qubits, ascending.
std::vector<uint32_t> weight_sector(int n_qubits, int n);

/// sum_pq t_pq a+_p a_q
FermionOperator one_body_operator(const Eigen::MatrixXd& t);
/// 1/2 sum v2s(p,q,r,s) a+_p a+_q a_r a_s
FermionOperator two_body_operator(const SpinIntegrals& si);
/// Electronic Hamiltonian without e_core.
FermionOperator hamiltonian_operator(const SpinIntegrals& si);
/// sum_p n_p
FermionOperator number_operator(int n_modes);

}  // namespace nomp2
