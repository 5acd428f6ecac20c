// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#include "nomp2/chem_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "nomp2/error.hpp"

namespace nomp2 {

void Eri::set_symmetric(int p, int q, int r, int s, double value) {
  for (auto [a, b, c, d] : {std::array{p, q, r, s}, std::array{q, p, r, s}, std::array{p, q, s, r},
                            std::array{q, p, s, r}, std::array{r, s, p, q}, std::array{s, r, p, q},
                            std::array{r, s, q, p}, std::array{s, r, q, p}}) {
    at(a, b, c, d) = value;
  }
}

double Eri::symmetry_error() const {
  double worst = 0.0;
  for (int p = 0; p < n_; ++p)
    for (int q = 0; q < n_; ++q)
      for (int r = 0; r < n_; ++r)
        for (int s = 0; s < n_; ++s) {
          double v = (*this)(p, q, r, s);
          worst = std::max({worst, std::abs(v - (*this)(q, p, r, s)),
                            std::abs(v - (*this)(p, q, s, r)), std::abs(v - (*this)(r, s, p, q))});
        }
  return worst;
}

namespace {

int header_int(const std::string& header, const std::string& key, bool required, int fallback) {
  std::regex re("(^|[\\s,&])" + key + "\\s*=\\s*([-+]?\\d+)", std::regex::icase);
  std::smatch m;
  if (std::regex_search(header, m, re)) return std::stoi(m[2].str());
  if (required) throw Error(ErrorKind::kHeader, "missing " + key);
  return fallback;
}

double parse_value(std::string token, int line_no) {
  std::replace(token.begin(), token.end(), 'D', 'E');
  std::replace(token.begin(), token.end(), 'd', 'e');
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size() || !std::isfinite(v))
    throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": bad value '" + token + "'");
  return v;
}

}  // namespace

MolecularIntegrals parse_fcidump(std::istream& in) {
  std::string header;
  std::string line;
  int line_no = 0;
  bool in_header = false;
  bool header_done = false;
  while (!header_done && std::getline(in, line)) {
    ++line_no;
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
    if (!in_header) {
      if (trimmed.empty()) continue;
      std::string upper = trimmed.substr(0, 4);
      std::transform(upper.begin(), upper.end(), upper.begin(), ::toupper);
      if (upper != "&FCI") throw Error(ErrorKind::kHeader, "expected &FCI on line " + std::to_string(line_no));
      in_header = true;
    }
    header += " " + line;
    std::string upper = line;
    std::transform(upper.begin(), upper.end(), upper.begin(), ::toupper);
    if (upper.find("&END") != std::string::npos || trimmed == "/" ||
        (trimmed.size() > 1 && trimmed.back() == '/')) {
      header_done = true;
    }
  }
  if (!header_done) throw Error(ErrorKind::kHeader, "unterminated or missing &FCI header");

  MolecularIntegrals mi;
  mi.n_spatial = header_int(header, "NORB", true, 0);
  mi.n_electrons = header_int(header, "NELEC", true, 0);
  mi.ms2 = header_int(header, "MS2", false, 0);
  if (mi.n_spatial <= 0) throw Error(ErrorKind::kHeader, "NORB must be positive");
  if (mi.n_electrons < 0) throw Error(ErrorKind::kHeader, "NELEC must be nonnegative");
  const int m = mi.n_spatial;
  mi.h1 = Eigen::MatrixXd::Zero(m, m);
  mi.eri = Eri(m);

  std::map<std::array<int, 4>, double> seen;
  auto record = [&](std::array<int, 4> key, double v) {
    auto [it, inserted] = seen.emplace(key, v);
    if (!inserted && std::abs(it->second - v) > 1e-10) {
      throw Error(ErrorKind::kConsistency, "line " + std::to_string(line_no) +
                                               ": conflicting duplicate for integral " +
                                               std::to_string(key[0] + 1) + " " + std::to_string(key[1] + 1) +
                                               " " + std::to_string(key[2] + 1) + " " +
                                               std::to_string(key[3] + 1));
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 5)
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": expected 'value i j k l'");
    double v = parse_value(tok[0], line_no);
    int idx[4];
    for (int k = 0; k < 4; ++k) {
      size_t used = 0;
      try {
        idx[k] = std::stoi(tok[k + 1], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok[k + 1].size() || idx[k] < 0 || idx[k] > m)
        throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": bad index '" + tok[k + 1] + "'");
    }
    auto [i, j, k, l] = idx;
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      record({-1, -1, -1, -1}, v);
      mi.e_core = v;
    } else if (k == 0 && l == 0) {
      if (i == 0 || j == 0)
        throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": orbital-energy records are not supported");
      int p = std::min(i, j) - 1, q = std::max(i, j) - 1;
      record({p, q, -1, -1}, v);
      mi.h1(p, q) = v;
      mi.h1(q, p) = v;
    } else {
      if (i == 0 || j == 0 || k == 0 || l == 0)
        throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": incomplete two-electron index");
      int p = i - 1, q = j - 1, r = k - 1, s = l - 1;
      std::array<int, 2> a = {std::min(p, q), std::max(p, q)};
      std::array<int, 2> b = {std::min(r, s), std::max(r, s)};
      if (b < a) std::swap(a, b);
      record({a[0], a[1], b[0], b[1]}, v);
      mi.eri.set_symmetric(p, q, r, s, v);
    }
  }
  validate(mi);
  return mi;
}

MolecularIntegrals read_fcidump(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kInput, "cannot open FCIDUMP '" + path + "'");
  try {
    return parse_fcidump(f);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + std::string(e.what()).substr(std::string(to_string(e.kind())).size() + 2));
  }
}

void validate(const MolecularIntegrals& mi) {
  if (mi.h1.rows() != mi.n_spatial || mi.h1.cols() != mi.n_spatial || mi.eri.n() != mi.n_spatial)
    throw Error(ErrorKind::kInput, "integral dimensions disagree with n_spatial");
  if ((mi.h1 - mi.h1.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(ErrorKind::kInput, "h1 is not symmetric");
  if (mi.eri.symmetry_error() > 1e-12) throw Error(ErrorKind::kInput, "eri lacks 8-fold symmetry");
  if (mi.n_electrons % 2 != 0 || mi.ms2 != 0)
    throw Error(ErrorKind::kInput, "only closed-shell inputs (even NELEC, MS2=0) are supported");
  if (mi.n_electrons > 2 * mi.n_spatial) throw Error(ErrorKind::kInput, "more electrons than spin orbitals");
}

MolecularIntegrals freeze_active_space(const MolecularIntegrals& mi, const ActiveSpaceSpec& spec) {
  const int m = mi.n_spatial;
  std::set<int> frozen(spec.frozen_occupied.begin(), spec.frozen_occupied.end());
  std::set<int> deleted(spec.deleted_virtual.begin(), spec.deleted_virtual.end());
  for (int i : frozen)
    if (i < 0 || i >= m) throw Error(ErrorKind::kInput, "frozen index out of range: " + std::to_string(i));
  for (int a : deleted)
    if (a < 0 || a >= m) throw Error(ErrorKind::kInput, "deleted index out of range: " + std::to_string(a));
  for (int i : frozen)
    if (deleted.count(i)) throw Error(ErrorKind::kInput, "frozen and deleted lists overlap");
  std::vector<int> active;
  for (int p = 0; p < m; ++p)
    if (!frozen.count(p) && !deleted.count(p)) active.push_back(p);
  if (active.empty()) throw Error(ErrorKind::kInput, "no active orbitals remain");
  if (!frozen.empty() && *frozen.rbegin() > active.front())
    throw Error(ErrorKind::kInput, "frozen orbitals must precede all active orbitals");
  const int n_el = mi.n_electrons - 2 * static_cast<int>(frozen.size());
  if (n_el <= 0) throw Error(ErrorKind::kInput, "active electron count must be positive");

  MolecularIntegrals out;
  const int ma = static_cast<int>(active.size());
  out.n_spatial = ma;
  out.n_electrons = n_el;
  out.ms2 = mi.ms2;
  out.e_core = mi.e_core;
  for (int i : frozen) {
    out.e_core += 2.0 * mi.h1(i, i);
    for (int j : frozen) out.e_core += 2.0 * mi.eri(i, i, j, j) - mi.eri(i, j, j, i);
  }
  out.h1 = Eigen::MatrixXd::Zero(ma, ma);
  out.eri = Eri(ma);
  for (int x = 0; x < ma; ++x) {
    for (int y = 0; y < ma; ++y) {
      int p = active[x], q = active[y];
      double h = mi.h1(p, q);
      for (int i : frozen) h += 2.0 * mi.eri(p, q, i, i) - mi.eri(p, i, i, q);
      out.h1(x, y) = h;
      for (int z = 0; z < ma; ++z)
        for (int w = 0; w < ma; ++w) out.eri.at(x, y, z, w) = mi.eri(p, q, active[z], active[w]);
    }
  }
  return out;
}

SpinIntegrals spin_orbitalize(const MolecularIntegrals& mi) {
  validate(mi);
  SpinIntegrals si;
  si.n_spin = 2 * mi.n_spatial;
  si.h1s = Eigen::MatrixXd::Zero(si.n_spin, si.n_spin);
  for (int p = 0; p < mi.n_spatial; ++p)
    for (int q = 0; q < mi.n_spatial; ++q) {
      si.h1s(2 * p, 2 * q) = mi.h1(p, q);
      si.h1s(2 * p + 1, 2 * q + 1) = mi.h1(p, q);
    }
  si.eri = mi.eri;
  return si;
}

Eigen::VectorXd orbital_energies(const SpinIntegrals& si, int n_electrons, std::vector<std::string>* warnings) {
  const int n = si.n_spin;
  Eigen::VectorXd eps(n);
  for (int p = 0; p < n; ++p) {
    double e = si.h1s(p, p);
    for (int i = 0; i < n_electrons; ++i) e += si.v2s(p, i, i, p) - si.v2s(p, i, p, i);
    eps(p) = e;
  }
  if (warnings && n_electrons > 0 && n_electrons < n) {
    double homo = eps.head(n_electrons).maxCoeff();
    double lumo = eps.tail(n - n_electrons).minCoeff();
    if (homo > lumo) {
      std::ostringstream os;
      os << "non-aufbau orbital ordering (max occupied " << homo << " > min virtual " << lumo << ")";
      warnings->push_back(os.str());
    }
  }
  return eps;
}

Perturbation build_perturbation(const SpinIntegrals& si, const Eigen::VectorXd& eps, const Eigen::MatrixXd& theta) {
  const int n = si.n_spin;
  if (theta.rows() != n || theta.cols() != n || eps.size() != n)
    throw Error(ErrorKind::kInput, "theta/eps dimensions do not match the spin-orbital count");
  if ((theta + theta.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(ErrorKind::kInput, "theta matrix is not antisymmetric");
  Perturbation out;
  out.u = theta.exp();
  out.t = si.h1s - out.u * eps.asDiagonal() * out.u.transpose();
  return out;
}

}  // namespace nomp2
