// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#include "nomp2/pauli_jw.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "nomp2/error.hpp"

namespace nomp2 {

namespace {

constexpr cplx kI(0.0, 1.0);

// i^k for k mod 4
cplx ipow(int k) {
  switch (k & 3) {
    case 0: return 1.0;
    case 1: return kI;
    case 2: return -1.0;
    default: return -kI;
  }
}

}  // namespace

QubitOperator QubitOperator::identity(cplx c) {
  QubitOperator q;
  q.add_term({}, c);
  return q;
}

QubitOperator QubitOperator::single(char letter, int qubit, cplx c) {
  PauliKey k;
  uint32_t bit = 1u << qubit;
  switch (letter) {
    case 'I': break;
    case 'X': k.x = bit; break;
    case 'Y': k.x = bit; k.z = bit; break;
    case 'Z': k.z = bit; break;
    default: throw Error(ErrorKind::kInput, std::string("unknown Pauli letter ") + letter);
  }
  QubitOperator q;
  q.add_term(k, c);
  return q;
}

void QubitOperator::add_term(PauliKey k, cplx c) { terms_[k] += c; }

QubitOperator& QubitOperator::operator+=(const QubitOperator& o) {
  for (const auto& [k, c] : o.terms_) terms_[k] += c;
  return *this;
}

QubitOperator QubitOperator::operator+(const QubitOperator& o) const {
  QubitOperator r = *this;
  r += o;
  return r;
}

QubitOperator QubitOperator::operator*(cplx c) const {
  QubitOperator r;
  for (const auto& [k, v] : terms_) r.terms_[k] = v * c;
  return r;
}

QubitOperator QubitOperator::operator*(const QubitOperator& o) const {
  // Write each string as i^{|x&z|} X^x Z^z. Moving Z^z1 past X^x2 costs (-1)^{|z1&x2|}.
  QubitOperator r;
  for (const auto& [k1, c1] : terms_) {
    for (const auto& [k2, c2] : o.terms_) {
      PauliKey k{k1.x ^ k2.x, k1.z ^ k2.z};
      int phase = std::popcount(k1.x & k1.z) + std::popcount(k2.x & k2.z) + 2 * std::popcount(k1.z & k2.x) -
                  std::popcount(k.x & k.z);
      r.terms_[k] += c1 * c2 * ipow(((phase % 4) + 4) % 4);
    }
  }
  r.simplify();
  return r;
}

void QubitOperator::simplify() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) < kDropTol)
      it = terms_.erase(it);
    else
      ++it;
  }
}

std::string pauli_letters(PauliKey k, int n_qubits) {
  std::string s(n_qubits, 'I');
  for (int q = 0; q < n_qubits; ++q) {
    bool x = (k.x >> q) & 1u, z = (k.z >> q) & 1u;
    s[q] = x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
  }
  return s;
}

std::string QubitOperator::str(int n_qubits) const {
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  for (const auto& [k, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i) " << pauli_letters(k, n_qubits);
  }
  return first ? "0" : os.str();
}

QubitOperator jw_map(const FermionOperator& op, int n_modes) {
  if (n_modes > 32) throw Error(ErrorKind::kCapacity, "at most 32 modes are supported");
  QubitOperator out;
  for (const auto& term : op) {
    QubitOperator prod = QubitOperator::identity(term.coefficient);
    for (const auto& [p, create] : term.ladder) {
      if (p < 0 || p >= n_modes) throw Error(ErrorKind::kInput, "mode index out of range: " + std::to_string(p));
      QubitOperator image = QubitOperator::single('X', p, 0.5) +
                            QubitOperator::single('Y', p, create ? cplx(0.0, -0.5) : cplx(0.0, 0.5));
      PauliKey zs{0, (1u << p) - 1u};
      QubitOperator string;
      string.add_term(zs, 1.0);
      prod = prod * (string * image);
    }
    out += prod;
  }
  out.simplify();
  return out;
}

CMatrix operator_matrix(const QubitOperator& op, int n_qubits) {
  if (n_qubits > 12) throw Error(ErrorKind::kCapacity, "dense matrices are limited to 12 qubits");
  const uint32_t dim = 1u << n_qubits;
  CMatrix m = CMatrix::Zero(dim, dim);
  for (const auto& [k, c] : op.terms()) {
    cplx base = c * ipow(std::popcount(k.x & k.z));
    for (uint32_t b = 0; b < dim; ++b) {
      double sign = (std::popcount(b & k.z) & 1) ? -1.0 : 1.0;
      m(b ^ k.x, b) += base * sign;
    }
  }
  return m;
}

CMatrix apply_number_postselection_projector(const CMatrix& m, int n_electrons) {
  CMatrix out = m;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (std::popcount(static_cast<uint32_t>(r)) != n_electrons) {
      out.row(r).setZero();
      out.col(r).setZero();
    }
  }
  return out;
}

std::vector<uint32_t> weight_sector(int n_qubits, int n) {
  std::vector<uint32_t> out;
  for (uint32_t b = 0; b < (1u << n_qubits); ++b)
    if (std::popcount(b) == n) out.push_back(b);
  return out;
}

FermionOperator one_body_operator(const Eigen::MatrixXd& t) {
  FermionOperator op;
  for (int p = 0; p < t.rows(); ++p)
    for (int q = 0; q < t.cols(); ++q)
      if (t(p, q) != 0.0) op.push_back({t(p, q), {{p, true}, {q, false}}});
  return op;
}

FermionOperator two_body_operator(const SpinIntegrals& si) {
  FermionOperator op;
  const int n = si.n_spin;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (p == q) continue;
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          if (r == s) continue;
          double v = si.v2s(p, q, r, s);
          if (v != 0.0) op.push_back({0.5 * v, {{p, true}, {q, true}, {r, false}, {s, false}}});
        }
    }
  return op;
}

FermionOperator hamiltonian_operator(const SpinIntegrals& si) {
  FermionOperator op = one_body_operator(si.h1s);
  FermionOperator two = two_body_operator(si);
  op.insert(op.end(), two.begin(), two.end());
  return op;
}

FermionOperator number_operator(int n_modes) {
  FermionOperator op;
  for (int p = 0; p < n_modes; ++p) op.push_back({1.0, {{p, true}, {p, false}}});
  return op;
}

}  // namespace nomp2
