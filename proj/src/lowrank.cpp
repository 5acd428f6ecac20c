// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#include "nomp2/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nomp2/error.hpp"

namespace nomp2 {

namespace {

// Eigenvectors as columns. Columns are permuted toward the identity when each
// has a distinct dominant row, signs make that entry positive, and the last
// column absorbs a reflection so det = +1.
void orient(Eigen::MatrixXd& o) {
  const Eigen::Index n = o.cols();
  std::vector<Eigen::Index> row(n);
  std::vector<bool> used(n, false);
  bool permutation = true;
  for (Eigen::Index c = 0; c < n; ++c) {
    o.col(c).cwiseAbs().maxCoeff(&row[c]);
    if (used[row[c]]) permutation = false;
    used[row[c]] = true;
  }
  if (permutation) {
    Eigen::MatrixXd p(o.rows(), n);
    for (Eigen::Index c = 0; c < n; ++c) p.col(row[c]) = o.col(c);
    o = p;
  }
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index r;
    o.col(c).cwiseAbs().maxCoeff(&r);
    if (o(r, c) < 0) o.col(c) *= -1.0;
  }
  if (o.determinant() < 0) o.col(n - 1) *= -1.0;
}

Eigen::MatrixXd effective_one_body(const Eigen::MatrixXd& t, const Eri& eri) {
  Eigen::MatrixXd h = spatial_block(t);
  const int m = eri.n();
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q) {
      double c = 0.0;
      for (int r = 0; r < m; ++r) c += eri(p, r, r, q);
      h(p, q) -= 0.5 * c;
    }
  return 0.5 * (h + h.transpose());
}

MeasurementGroup one_body_group(const Eigen::MatrixXd& h, double* residual) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  Eigen::MatrixXd o = es.eigenvectors();
  orient(o);
  Eigen::VectorXd lam = (o.transpose() * h * o).diagonal();
  const int m = static_cast<int>(h.rows());
  MeasurementGroup g;
  g.label = 0;
  g.rotation = o;
  g.linear = Eigen::VectorXd(2 * m);
  for (int p = 0; p < m; ++p) g.linear(2 * p) = g.linear(2 * p + 1) = lam(p);
  g.quadratic = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  if (residual) *residual = (o * lam.asDiagonal() * o.transpose() - h).norm();
  return g;
}

}  // namespace

Eigen::MatrixXd spin_lift(const Eigen::MatrixXd& spatial) {
  const Eigen::Index m = spatial.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  for (Eigen::Index p = 0; p < m; ++p)
    for (Eigen::Index q = 0; q < m; ++q) {
      out(2 * p, 2 * q) = spatial(p, q);
      out(2 * p + 1, 2 * q + 1) = spatial(p, q);
    }
  return out;
}

Eigen::MatrixXd spatial_block(const Eigen::MatrixXd& spin) {
  if (spin.rows() != spin.cols() || spin.rows() % 2 != 0)
    throw Error(ErrorKind::kInput, "spin-orbital matrix must be square with even size");
  const Eigen::Index m = spin.rows() / 2;
  Eigen::MatrixXd a(m, m);
  for (Eigen::Index p = 0; p < m; ++p)
    for (Eigen::Index q = 0; q < m; ++q) {
      a(p, q) = spin(2 * p, 2 * q);
      if (std::abs(spin(2 * p + 1, 2 * q + 1) - a(p, q)) > 1e-10 || std::abs(spin(2 * p, 2 * q + 1)) > 1e-10 ||
          std::abs(spin(2 * p + 1, 2 * q)) > 1e-10)
        throw Error(ErrorKind::kInput, "matrix lacks equal-spin block structure");
    }
  return a;
}

FactorizedPerturbation factorize(const Eigen::MatrixXd& t, const Eri& eri, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::kInput, "truncation tolerance must be positive");
  if ((t - t.transpose()).cwiseAbs().maxCoeff() > 1e-10) throw Error(ErrorKind::kInput, "one-body matrix not symmetric");
  if (eri.symmetry_error() > 1e-10) throw Error(ErrorKind::kInput, "two-body tensor not 8-fold symmetric");
  const int m = eri.n();
  if (t.rows() != 2 * m) throw Error(ErrorKind::kInput, "one-body and two-body dimensions disagree");

  FactorizedPerturbation fp;
  fp.truncation_tol = tol;
  double r1 = 0.0;
  fp.groups.push_back(one_body_group(effective_one_body(t, eri), &r1));

  const int mm = m * m;
  Eigen::MatrixXd a(mm, mm);
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s) a(p * m + q, r * m + s) = eri(p, q, r, s);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const Eigen::VectorXd& w = es.eigenvalues();
  Eigen::MatrixXd v = es.eigenvectors();

  std::vector<int> keep;
  for (int k = 0; k < mm; ++k)
    if (std::abs(w(k)) > tol) keep.push_back(k);
  for (int k : keep) {
    Eigen::Index r;
    v.col(k).cwiseAbs().maxCoeff(&r);
    if (v(r, k) < 0) v.col(k) *= -1.0;
  }
  std::stable_sort(keep.begin(), keep.end(), [&](int x, int y) {
    if (std::abs(w(x)) != std::abs(w(y))) return std::abs(w(x)) > std::abs(w(y));
    return x < y;
  });

  Eigen::MatrixXd recon = Eigen::MatrixXd::Zero(mm, mm);
  for (int k : keep) {
    recon += w(k) * v.col(k) * v.col(k).transpose();
    Eigen::MatrixXd g(m, m);
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q) g(p, q) = v(p * m + q, k);
    g = 0.5 * (g + g.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gs(g);
    Eigen::MatrixXd o = gs.eigenvectors();
    orient(o);
    Eigen::VectorXd f = (o.transpose() * g * o).diagonal();

    MeasurementGroup grp;
    grp.label = static_cast<int>(fp.groups.size());
    grp.rotation = o;
    grp.linear = Eigen::VectorXd::Zero(2 * m);
    grp.quadratic = Eigen::MatrixXd(2 * m, 2 * m);
    for (int p = 0; p < 2 * m; ++p)
      for (int q = 0; q < 2 * m; ++q) grp.quadratic(p, q) = 0.5 * w(k) * f(p / 2) * f(q / 2);
    fp.groups.push_back(std::move(grp));
  }
  fp.reconstruction_error = std::hypot((recon - a).norm(), r1);
  return fp;
}

void refactor_one_body(FactorizedPerturbation& fp, const Eigen::MatrixXd& t, const Eri& eri) {
  if (fp.groups.empty()) throw Error(ErrorKind::kInput, "factorization has no groups");
  double r1 = 0.0;
  fp.groups[0] = one_body_group(effective_one_body(t, eri), &r1);
}

double group_coefficient(const MeasurementGroup& g, uint32_t bits) {
  const Eigen::Index n = std::max(g.linear.size(), g.quadratic.rows());
  const bool has_linear = g.linear.size() > 0, has_quadratic = g.quadratic.size() > 0;
  double c = 0.0;
  for (Eigen::Index p = 0; p < n; ++p) {
    if (!((bits >> p) & 1u)) continue;
    if (has_linear) c += g.linear(p);
    if (!has_quadratic) continue;
    for (Eigen::Index q = 0; q < n; ++q)
      if ((bits >> q) & 1u) c += g.quadratic(p, q);
  }
  return c;
}

std::vector<double> group_coefficient_table(const MeasurementGroup& g, int n_qubits) {
  std::vector<double> out(size_t{1} << n_qubits);
  for (uint32_t b = 0; b < out.size(); ++b) out[b] = group_coefficient(g, b);
  return out;
}

}  // namespace nomp2
