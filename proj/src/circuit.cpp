// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#include "nomp2/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nomp2/error.hpp"

namespace nomp2 {

namespace {

constexpr double kPi = std::numbers::pi;

void push_cry(std::vector<Gate>& g, int c, int t, double phi) {
  g.push_back(Gate::cnot(c, t));
  g.push_back(Gate::ry(t, -phi / 2));
  g.push_back(Gate::cnot(c, t));
  g.push_back(Gate::ry(t, phi / 2));
}

// Relative-phase Toffoli onto c; its inverse is the reversed sequence with
// negated angles.
std::vector<Gate> relative_toffoli(int a, int b, int c) {
  return {Gate::ry(c, kPi / 4), Gate::cnot(b, c), Gate::ry(c, kPi / 4), Gate::cnot(a, c),
          Gate::ry(c, -kPi / 4), Gate::cnot(b, c), Gate::ry(c, -kPi / 4)};
}

std::vector<Gate> inverse(const std::vector<Gate>& seq) {
  std::vector<Gate> out(seq.rbegin(), seq.rend());
  for (Gate& g : out)
    if (g.kind == GateKind::kRY || g.kind == GateKind::kRZ) g.angle = -g.angle;
  return out;
}

void push_ccry(std::vector<Gate>& g, int a, int b, int t, double phi) {
  g.push_back(Gate::ry(t, phi / 4));
  g.push_back(Gate::cnot(a, t));
  g.push_back(Gate::ry(t, -phi / 4));
  g.push_back(Gate::cnot(b, t));
  g.push_back(Gate::ry(t, phi / 4));
  g.push_back(Gate::cnot(a, t));
  g.push_back(Gate::ry(t, -phi / 4));
  g.push_back(Gate::cnot(b, t));
}

std::vector<Gate> lower_multi_cry(const Gate& m) {
  const int c1 = m.q[0], c2 = m.q[1], c3 = m.q[2], t = m.q[3];
  const double th = m.angle;
  std::vector<Gate> g;
  push_cry(g, c3, t, th / 2);
  auto tof = relative_toffoli(c1, c2, c3);
  g.insert(g.end(), tof.begin(), tof.end());
  push_cry(g, c3, t, -th / 2);
  auto inv = inverse(tof);
  g.insert(g.end(), inv.begin(), inv.end());
  push_ccry(g, c1, c2, t, th / 2);
  return g;
}

// Jordan-Wigner parity corrections for modes strictly between i,j and a,b.
std::vector<Gate> parity_prefix(int i, int j, int a, int b) {
  std::vector<Gate> g;
  std::vector<int> r1, r2;
  for (int k = i + 1; k < j; ++k) r1.push_back(k);
  for (int k = a + 1; k < b; ++k) r2.push_back(k);
  for (size_t k = 0; k + 1 < r1.size(); ++k) g.push_back(Gate::cnot(r1[k], r1[k + 1]));
  for (size_t k = 0; k + 1 < r2.size(); ++k) g.push_back(Gate::cnot(r2[k], r2[k + 1]));
  if (!r1.empty() && !r2.empty()) {
    g.push_back(Gate::cnot(r1.back(), r2.back()));
    g.push_back(Gate::cz(r2.back(), b));
  } else if (!r1.empty()) {
    g.push_back(Gate::cz(r1.back(), b));
  } else if (!r2.empty()) {
    g.push_back(Gate::cz(r2.back(), b));
  }
  return g;
}

Eigen::MatrixXd givens_matrix(int n, int p, double a) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n);
  double c = std::cos(a), s = std::sin(a);
  g(p, p) = c;
  g(p, p + 1) = s;
  g(p + 1, p) = -s;
  g(p + 1, p + 1) = c;
  return g;
}

// atan2 with a negligible numerator snapped to zero, so the pivot ends positive.
double elimination_angle(double x, double y) { return std::atan2(std::abs(x) > 1e-14 ? x : 0.0, y); }

}  // namespace

const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::kX: return "X";
    case GateKind::kH: return "H";
    case GateKind::kRY: return "RY";
    case GateKind::kRZ: return "RZ";
    case GateKind::kCNOT: return "CNOT";
    case GateKind::kCZ: return "CZ";
    case GateKind::kMultiCRY: return "MULTI_CRY";
  }
  return "?";
}

void validate(const Circuit& c) {
  for (const Gate& g : c.gates) {
    for (int k = 0; k < g.nq; ++k) {
      if (g.q[k] < 0 || g.q[k] >= c.n_qubits)
        throw Error(ErrorKind::kInput, std::string(gate_name(g.kind)) + " operand out of range");
      for (int l = 0; l < k; ++l)
        if (g.q[l] == g.q[k]) throw Error(ErrorKind::kInput, std::string(gate_name(g.kind)) + " repeats an operand");
    }
  }
}

Circuit prep_reference(int n_qubits, int n_electrons) {
  if (n_electrons < 0 || n_electrons > n_qubits)
    throw Error(ErrorKind::kInput, "electron count exceeds qubit count");
  Circuit c;
  c.n_qubits = n_qubits;
  for (int q = 0; q < n_electrons; ++q) c.gates.push_back(Gate::x(q));
  return c;
}

std::vector<Gate> single_excitation(int p, double alpha) {
  if (p < 0) throw Error(ErrorKind::kInput, "single excitation mode out of range");
  const int q = p + 1;
  return {Gate::cnot(q, p),          Gate::rz(p, kPi / 2),      Gate::ry(q, kPi / 2 - alpha),
          Gate::cnot(p, q),          Gate::ry(q, alpha - kPi / 2), Gate::cnot(q, p),
          Gate::rz(p, -kPi / 2),     Gate::rz(q, kPi / 2)};
}

std::vector<Gate> double_excitation(int i, int j, int a, int b, double omega) {
  if (!(0 <= i && i < j && j < a && a < b))
    throw Error(ErrorKind::kInput, "double excitation requires i < j < a < b");
  std::vector<Gate> pre = parity_prefix(i, j, a, b);
  std::vector<Gate> core = {Gate::cnot(j, i), Gate::cnot(b, a), Gate::cnot(b, j), Gate::x(i), Gate::x(a)};
  std::vector<Gate> g = pre;
  g.insert(g.end(), core.begin(), core.end());
  g.push_back(Gate::multi_cry(i, j, a, b, 2.0 * omega));
  g.insert(g.end(), core.rbegin(), core.rend());
  g.insert(g.end(), pre.rbegin(), pre.rend());
  return g;
}

std::vector<Givens> givens_decompose(const Eigen::MatrixXd& u_in) {
  const int n = static_cast<int>(u_in.rows());
  if (u_in.cols() != n) throw Error(ErrorKind::kInput, "rotation must be square");
  if ((u_in.transpose() * u_in - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10)
    throw Error(ErrorKind::kInput, "rotation is not orthogonal");
  if (u_in.determinant() < 0) throw Error(ErrorKind::kInput, "rotation has determinant -1");

  Eigen::MatrixXd u = u_in;
  std::vector<Givens> left, right;
  for (int i = 0; i + 1 < n; ++i) {
    if (i % 2 == 0) {
      for (int j = 0; j <= i; ++j) {
        int r = n - 1 - j, c = i - j;
        double a = elimination_angle(u(r, c), u(r, c + 1));
        u = u * givens_matrix(n, c, a);
        right.push_back({c, a});
      }
    } else {
      for (int j = 1; j <= i + 1; ++j) {
        int r = n + j - (i + 1) - 1, c = j - 1;
        double a = elimination_angle(u(r, c), u(r - 1, c));
        u = givens_matrix(n, r - 1, a) * u;
        left.push_back({r - 1, a});
      }
    }
  }
  if ((u - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-8)
    throw Error(ErrorKind::kInput, "Givens elimination left a non-identity diagonal");

  std::vector<Givens> seq;
  seq.reserve(left.size() + right.size());
  for (const Givens& g : right) seq.push_back({g.p, -g.angle});
  for (auto it = left.rbegin(); it != left.rend(); ++it) seq.push_back({it->p, -it->angle});
  return seq;
}

Eigen::MatrixXd givens_product(const std::vector<Givens>& seq, int n) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  for (const Givens& g : seq) m = givens_matrix(n, g.p, g.angle) * m;
  return m;
}

Circuit compile_orbital_rotation(const Eigen::MatrixXd& u) {
  Circuit c;
  c.n_qubits = static_cast<int>(u.rows());
  for (const Givens& g : givens_decompose(u)) c.append(single_excitation(g.p, g.angle));
  return c;
}

Circuit lower(const Circuit& c) {
  Circuit out;
  out.n_qubits = c.n_qubits;
  out.meta = c.meta;
  out.gates.reserve(c.gates.size());
  for (const Gate& g : c.gates) {
    if (g.kind == GateKind::kMultiCRY)
      out.append(lower_multi_cry(g));
    else
      out.gates.push_back(g);
  }
  return out;
}

ResourceReport cnot_depth(const Circuit& c) {
  Circuit l = lower(c);
  ResourceReport r;
  std::vector<int> cx_level(l.n_qubits, 0), tq_level(l.n_qubits, 0);
  for (const Gate& g : l.gates) {
    if (g.kind == GateKind::kCNOT || g.kind == GateKind::kCZ) {
      int a = g.q[0], b = g.q[1];
      int tq = std::max(tq_level[a], tq_level[b]) + 1;
      tq_level[a] = tq_level[b] = tq;
      int cx = std::max(cx_level[a], cx_level[b]) + (g.kind == GateKind::kCNOT ? 1 : 0);
      cx_level[a] = cx_level[b] = cx;
      (g.kind == GateKind::kCNOT ? r.cnot_count : r.cz_count)++;
    } else {
      r.single_qubit_count++;
    }
  }
  for (int q = 0; q < l.n_qubits; ++q) {
    r.cnot_depth = std::max(r.cnot_depth, cx_level[q]);
    r.two_qubit_depth = std::max(r.two_qubit_depth, tq_level[q]);
  }
  return r;
}

std::string dump(const Circuit& c) {
  std::ostringstream os;
  os.precision(17);
  os << "# qubits " << c.n_qubits;
  if (c.meta.set) os << " set " << c.meta.set << " group " << c.meta.group;
  if (c.meta.excitation[0] >= 0) {
    os << " excitation";
    for (int k : c.meta.excitation) os << ' ' << k;
    os << " omega " << c.meta.omega;
  }
  os << '\n';
  for (const Gate& g : c.gates) {
    os << gate_name(g.kind);
    for (int k = 0; k < g.nq; ++k) os << ' ' << g.q[k];
    if (g.kind == GateKind::kRY || g.kind == GateKind::kRZ || g.kind == GateKind::kMultiCRY) os << ' ' << g.angle;
    os << '\n';
  }
  return os.str();
}

}  // namespace nomp2
