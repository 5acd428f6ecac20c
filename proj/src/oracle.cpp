// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#include "nomp2/oracle.hpp"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "nomp2/error.hpp"
#include "nomp2/simulator.hpp"

namespace nomp2 {

double fci_energy(const SpinIntegrals& si, int n_electrons, double e_core) {
  if (si.n_spin > 12) throw Error(ErrorKind::kCapacity, "FCI oracle limited to 12 spin orbitals");
  CMatrix h = operator_matrix(jw_map(hamiltonian_operator(si), si.n_spin), si.n_spin);
  std::vector<uint32_t> sector = weight_sector(si.n_spin, n_electrons);
  const Eigen::Index d = static_cast<Eigen::Index>(sector.size());
  Eigen::MatrixXd block(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) block(r, c) = h(sector[r], sector[c]).real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0) + e_core;
}

double hf_energy(const SpinIntegrals& si, int n_electrons, double e_core) {
  double e = e_core;
  for (int i = 0; i < n_electrons; ++i) {
    e += si.h1s(i, i);
    for (int j = 0; j < n_electrons; ++j) e += 0.5 * (si.v2s(i, j, j, i) - si.v2s(i, j, i, j));
  }
  return e;
}

double antisymmetrized(const SpinIntegrals& si, int p, int q, int r, int s) {
  return si.v2s(p, q, s, r) - si.v2s(p, q, r, s);
}

double canonical_mp2(const SpinIntegrals& si, const Eigen::VectorXd& eps, int n_electrons) {
  double e = 0.0;
  const int n = si.n_spin;
  for (int i = 0; i < n_electrons; ++i)
    for (int j = i + 1; j < n_electrons; ++j)
      for (int a = n_electrons; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
          const double delta = eps(i) + eps(j) - eps(a) - eps(b);
          if (std::abs(delta) < 1e-8) continue;
          const double v = antisymmetrized(si, i, j, a, b);
          e += v * v / delta;
        }
  return e;
}

CMatrix circuit_unitary(const Circuit& c) {
  if (c.n_qubits > 8) throw Error(ErrorKind::kCapacity, "circuit unitaries limited to 8 qubits");
  const Eigen::Index dim = Eigen::Index{1} << c.n_qubits;
  CMatrix u(dim, dim);
  Circuit l = lower(c);
  for (Eigen::Index b = 0; b < dim; ++b) u.col(b) = run(l, StateVector::basis(c.n_qubits, static_cast<uint32_t>(b))).amplitudes;
  return u;
}

CMatrix dense_exponential(const QubitOperator& generator, int n_qubits, double scale) {
  CMatrix m = operator_matrix(generator, n_qubits) * scale;
  return m.exp();
}

double distance_mod_phase(const CMatrix& a, const CMatrix& b) {
  std::complex<double> t = (a.adjoint() * b).trace();
  std::complex<double> phase = std::abs(t) > 0 ? t / std::abs(t) : 1.0;
  return (a * phase - b).cwiseAbs().maxCoeff();
}

}  // namespace nomp2
