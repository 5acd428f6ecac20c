// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace nomp2 {

enum class GateKind { kX, kH, kRY, kRZ, kCNOT, kCZ, kMultiCRY };

/// Operands are 0-based qubits. CNOT: {control, target}. MULTI_CRY: controls
/// then target, so nq = n_controls + 1.
struct Gate {
  GateKind kind = GateKind::kX;
  std::array<int, 4> q{};
  int nq = 1;
  double angle = 0.0;

  static Gate x(int a) { return {GateKind::kX, {a}, 1, 0.0}; }
  static Gate h(int a) { return {GateKind::kH, {a}, 1, 0.0}; }
  static Gate ry(int a, double t) { return {GateKind::kRY, {a}, 1, t}; }
  static Gate rz(int a, double t) { return {GateKind::kRZ, {a}, 1, t}; }
  static Gate cnot(int c, int t) { return {GateKind::kCNOT, {c, t}, 2, 0.0}; }
  static Gate cz(int a, int b) { return {GateKind::kCZ, {a, b}, 2, 0.0}; }
  static Gate multi_cry(int c1, int c2, int c3, int t, double angle) {
    return {GateKind::kMultiCRY, {c1, c2, c3, t}, 4, angle};
  }
};

/// Provenance: set 'A' or 'B' (or 0 when not part of an estimator set),
/// measurement group, double-excitation indices (0-based) and omega.
struct CircuitMeta {
  char set = 0;
  int group = -1;
  std::array<int, 4> excitation{-1, -1, -1, -1};
  double omega = 0.0;
};

struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;
  CircuitMeta meta;

  void append(const std::vector<Gate>& g) { gates.insert(gates.end(), g.begin(), g.end()); }
  void append(const Circuit& c) { append(c.gates); }
};

struct ResourceReport {
  int cnot_depth = 0;        // CNOT layers only; CZ synchronizes but adds no layer
  int two_qubit_depth = 0;   // CNOT and CZ layers
  int cnot_count = 0;
  int cz_count = 0;
  int single_qubit_count = 0;
};

/// Throws if any gate is out of range or has repeated operands.
void validate(const Circuit& c);

Circuit prep_reference(int n_qubits, int n_electrons);

/// exp[alpha (a+_p a_{p+1} - h.c.)] up to global phase; CNOT depth 3.
std::vector<Gate> single_excitation(int p, double alpha);

/// exp[omega (a+_a a+_b a_j a_i - h.c.)] for i < j < a < b; 0-based modes.
std::vector<Gate> double_excitation(int i, int j, int a, int b, double omega);

/// Givens parameters in time order: exp[angle (a+_p a_{p+1} - h.c.)].
struct Givens {
  int p;
  double angle;
};

/// Zig-zag elimination of an orthogonal matrix into N(N-1)/2 nearest-neighbour
/// rotations whose time-ordered product has single-particle matrix U.
std::vector<Givens> givens_decompose(const Eigen::MatrixXd& u);

/// Single-particle matrix of a Givens sequence (product in time order).
Eigen::MatrixXd givens_product(const std::vector<Givens>& seq, int n);

/// Circuit whose action on one-particle states is |q> -> sum_p U_pq |p>.
Circuit compile_orbital_rotation(const Eigen::MatrixXd& u);

/// Replaces each MULTI_CRY by its CNOT network (CNOT depth 13).
Circuit lower(const Circuit& c);

ResourceReport cnot_depth(const Circuit& c);

/// One gate per line: KIND qubits... [angle].
std::string dump(const Circuit& c);

const char* gate_name(GateKind k);

}  // namespace nomp2
