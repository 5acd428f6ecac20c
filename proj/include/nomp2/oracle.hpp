// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "nomp2/chem_io.hpp"
#include "nomp2/circuit.hpp"
#include "nomp2/pauli_jw.hpp"

namespace nomp2 {

/// Lowest eigenvalue of the Hamming-weight-n block of the JW Hamiltonian, plus e_core.
double fci_energy(const SpinIntegrals& si, int n_electrons, double e_core);

/// <HF|H|HF> + e_core with the first n_electrons spin orbitals occupied.
double hf_energy(const SpinIntegrals& si, int n_electrons, double e_core);

/// <pq||rs> = <pq|rs> - <pq|sr> over spin orbitals.
double antisymmetrized(const SpinIntegrals& si, int p, int q, int r, int s);

/// sum_{i<j, a<b} |<ij||ab>|^2 / (e_i + e_j - e_a - e_b); degenerate terms skipped.
double canonical_mp2(const SpinIntegrals& si, const Eigen::VectorXd& eps, int n_electrons);

/// Dense product of the circuit's gates (N <= 8).
CMatrix circuit_unitary(const Circuit& c);

/// exp(scale * M) for the dense matrix of a qubit operator.
CMatrix dense_exponential(const QubitOperator& generator, int n_qubits, double scale = 1.0);

/// max |A e^{i phi} - B| with phi chosen from tr(A^dagger B).
double distance_mod_phase(const CMatrix& a, const CMatrix& b);

/// One (molecule, distance) entry of a committed reference file.
struct ReferenceRecord {
  std::string molecule;
  double distance_bohr = 0.0;
  std::string fcidump;  // file name relative to the reference file
  int n_electrons = 0;
  ActiveSpaceSpec active;
  double e_hf = 0.0;
  double e_mp2 = 0.0;
  double e_omp2 = 0.0;
  double e_fci = 0.0;
  std::vector<double> orbital_energies;  // canonical, active spatial orbitals
  std::string source;
};

/// Records sorted by distance. Throws on malformed files.
std::vector<ReferenceRecord> load_reference(const std::string& path);

/// Reads the record's FCIDUMP (resolved against dir) and applies its active space.
MolecularIntegrals load_fixture(const ReferenceRecord& rec, const std::string& dir);

/// dir/reference.json
std::string reference_path(const std::string& dir);

}  // namespace nomp2
