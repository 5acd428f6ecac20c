// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#include "nomp2/omp2.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "nomp2/error.hpp"

namespace nomp2 {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kOmegas[2] = {kPi / 4, kPi / 2};

bool gate_noisy(const EstimatorConfig& cfg) { return cfg.noise && cfg.noise->gate_noise(); }

// Everything one energy evaluation shares across its circuits.
struct Evaluation {
  const Omp2Problem& pb;
  const EstimatorConfig& cfg;
  Eigen::MatrixXd u;
  FactorizedPerturbation fp;
  Circuit rotation;                       // compile(U(theta))
  std::vector<const Circuit*> basis;      // compile(U_l^T) per group
  Circuit basis0;                         // group 0 owns its circuit
  std::vector<std::vector<double>> coeff;
  Rng root;
  long circuits = 0;
  double kept_sum = 0.0;
  long circuits_b = 0;
  double kept_sum_b = 0.0;

  Evaluation(const Omp2Problem& p, const ThetaParams& theta, const EstimatorConfig& c)
      : pb(p), cfg(c), root(c.seed) {
    if (cfg.mode == EstimatorMode::kShots && cfg.shots == 0) throw Error(ErrorKind::kUsage, "shots must be at least 1");
    Eigen::MatrixXd th = expand_theta(theta, pb.n_spin());
    u = th.exp();
    fp = pb.factorization(th);
    rotation = compile_orbital_rotation(u);
    basis0 = compile_orbital_rotation(spin_lift(fp.groups[0].rotation).transpose());
    basis.push_back(&basis0);
    for (int l = 1; l < pb.group_count(); ++l) basis.push_back(&pb.group_circuit(l));
    for (const auto& g : fp.groups) coeff.push_back(group_coefficient_table(g, pb.n_spin()));
  }

  Circuit prefix(const DoubleExcitationIndex* d, double omega) const {
    Circuit c = prep_reference(pb.n_spin(), pb.n_electrons());
    if (d) c.append(double_excitation(d->i, d->j, d->a, d->b, omega));
    c.append(rotation);
    return c;
  }

  // Expectation of group l on the state prepared by `pre`.
  std::pair<Estimate, double> measure(const Circuit& pre, const StateVector& pre_state, int l, Rng stream) {
    ++circuits;
    const int n = pb.n_spin();
    if (cfg.mode == EstimatorMode::kExact) {
      StateVector s = run(*basis[l], pre_state);
      kept_sum += 1.0;
      return {{exact_expectation(s, coeff[l]), 0.0}, 1.0};
    }
    const NoiseModel* noise = cfg.noise ? &*cfg.noise : nullptr;
    ShotTable table;
    if (!gate_noisy(cfg)) {
      StateVector s = run(*basis[l], pre_state);
      table = sample(s, cfg.shots, noise, stream);
    } else {
      Circuit full = pre;
      full.append(*basis[l]);
      full = lower(full);
      const StateVector zero = StateVector::basis(n);
      const uint64_t n_traj = std::max<uint64_t>(1, std::min<uint64_t>(cfg.trajectories, cfg.shots));
      table.n_qubits = n;
      table.shots = cfg.shots;
      for (uint64_t t = 0; t < n_traj; ++t) {
        uint64_t shots_t = cfg.shots / n_traj + (t < cfg.shots % n_traj ? 1 : 0);
        Rng ts = stream.split(t);
        StateVector s = run(full, zero, noise, &ts);
        ShotTable part = sample(s, shots_t, noise, ts);
        for (const auto& [b, k] : part.counts) table.counts[b] += k;
      }
    }
    if (cfg.postselect) table = postselect(table, pb.n_electrons());
    double kept = static_cast<double>(table.kept()) / static_cast<double>(table.shots);
    kept_sum += kept;
    return {expectation_with_variance(table, coeff[l]), kept};
  }

  Rng stream(char set, int l, const DoubleExcitationIndex* d, int omega_index) const {
    std::initializer_list<uint64_t> keys = {
        static_cast<uint64_t>(set), static_cast<uint64_t>(l), d ? static_cast<uint64_t>(d->i) : 99u,
        d ? static_cast<uint64_t>(d->j) : 99u, d ? static_cast<uint64_t>(d->a) : 99u,
        d ? static_cast<uint64_t>(d->b) : 99u, static_cast<uint64_t>(omega_index)};
    return root.split(keys);
  }

  Estimates e1() {
    Estimates out;
    Circuit pre = prefix(nullptr, 0.0);
    StateVector s = run(pre, StateVector::basis(pb.n_spin()));
    for (int l = 0; l < pb.group_count(); ++l) {
      auto [e, kept] = measure(pre, s, l, stream('A', l, nullptr, 0));
      out.e1.value += e.value;
      out.e1.variance += e.variance;
      out.kept.push_back(kept);
    }
    return out;
  }

  // Sum over groups of <V> on the set-B state for omega.
  Estimate set_b(const DoubleExcitationIndex& d, int omega_index) {
    Circuit pre = prefix(&d, kOmegas[omega_index]);
    StateVector s = run(pre, StateVector::basis(pb.n_spin()));
    Estimate total;
    for (int l = 0; l < pb.group_count(); ++l) {
      auto [e, kept] = measure(pre, s, l, stream('B', l, &d, omega_index));
      ++circuits_b;
      kept_sum_b += kept;
      total.value += e.value;
      total.variance += e.variance;
    }
    return total;
  }

  Estimate residual(const DoubleExcitationIndex& d, const Estimate& e1) {
    Estimate half = set_b(d, 0);
    Estimate full = set_b(d, 1);
    Estimate r;
    r.value = half.value - 0.5 * full.value - 0.5 * e1.value;
    r.variance = half.variance + 0.25 * full.variance + 0.25 * e1.variance;
    return r;
  }
};

}  // namespace

ThetaParams make_theta(int n_spin, int n_electrons) {
  if (n_electrons <= 0 || n_electrons >= n_spin || n_spin % 2 || n_electrons % 2)
    throw Error(ErrorKind::kInput, "theta pattern needs even 0 < n_electrons < n_spin");
  ThetaParams t;
  for (int p = 0; p < n_electrons; p += 2)
    for (int q = n_electrons; q < n_spin; q += 2) t.pairs.emplace_back(p, q);
  t.unique.assign(t.pairs.size(), 0.0);
  return t;
}

Eigen::MatrixXd expand_theta(const ThetaParams& t, int n_spin) {
  if (t.unique.size() != t.pairs.size()) throw Error(ErrorKind::kInput, "theta values and pattern differ in length");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_spin, n_spin);
  for (size_t k = 0; k < t.pairs.size(); ++k) {
    auto [p, q] = t.pairs[k];
    if (p < 0 || q + 1 >= n_spin || p % 2 || q % 2 || p == q)
      throw Error(ErrorKind::kInput, "theta pair does not fit the spin-orbital pattern");
    const double v = t.unique[k];
    m(p, q) = v;
    m(q, p) = -v;
    m(p + 1, q + 1) = v;
    m(q + 1, p + 1) = -v;
  }
  return m;
}

bool DoubleExcitationIndex::spin_conserving() const {
  return (i % 2) + (j % 2) == (a % 2) + (b % 2);
}

std::vector<DoubleExcitationIndex> enumerate_doubles(int n_spin, int n_electrons) {
  std::vector<DoubleExcitationIndex> out;
  for (int i = 0; i < n_electrons; ++i)
    for (int j = i + 1; j < n_electrons; ++j)
      for (int a = n_electrons; a < n_spin; ++a)
        for (int b = a + 1; b < n_spin; ++b) out.push_back({i, j, a, b});
  return out;
}

Omp2Problem::Omp2Problem(const MolecularIntegrals& mi, double tol)
    : si_(spin_orbitalize(mi)), n_electrons_(mi.n_electrons), e_core_(mi.e_core), tol_(tol) {
  eps_ = orbital_energies(si_, n_electrons_, &warnings_);
  Perturbation pert = build_perturbation(si_, eps_, Eigen::MatrixXd::Zero(si_.n_spin, si_.n_spin));
  fp_ = factorize(pert.t, si_.eri, tol);
  group_circuits_.resize(fp_.groups.size());
  for (size_t l = 1; l < fp_.groups.size(); ++l)
    group_circuits_[l] = compile_orbital_rotation(spin_lift(fp_.groups[l].rotation).transpose());
  doubles_ = enumerate_doubles(si_.n_spin, n_electrons_);
}

FactorizedPerturbation Omp2Problem::factorization(const Eigen::MatrixXd& theta) const {
  FactorizedPerturbation fp = fp_;
  refactor_one_body(fp, build_perturbation(si_, eps_, theta).t, si_.eri);
  return fp;
}

Circuit set_a_circuit(const Omp2Problem& pb, const Eigen::MatrixXd& u, const FactorizedPerturbation& fp, int l) {
  Circuit c = prep_reference(pb.n_spin(), pb.n_electrons());
  c.append(compile_orbital_rotation(u));
  c.append(compile_orbital_rotation(spin_lift(fp.groups.at(l).rotation).transpose()));
  c.meta.set = 'A';
  c.meta.group = l;
  return c;
}

Circuit set_b_circuit(const Omp2Problem& pb, const Eigen::MatrixXd& u, const FactorizedPerturbation& fp, int l,
                      const DoubleExcitationIndex& d, double omega) {
  Circuit c = prep_reference(pb.n_spin(), pb.n_electrons());
  c.append(double_excitation(d.i, d.j, d.a, d.b, omega));
  c.append(compile_orbital_rotation(u));
  c.append(compile_orbital_rotation(spin_lift(fp.groups.at(l).rotation).transpose()));
  c.meta.set = 'B';
  c.meta.group = l;
  c.meta.excitation = {d.i, d.j, d.a, d.b};
  c.meta.omega = omega;
  return c;
}

Estimates estimate_e1(const Omp2Problem& pb, const ThetaParams& theta, const EstimatorConfig& cfg) {
  Evaluation ev(pb, theta, cfg);
  return ev.e1();
}

Estimate estimate_residual(const Omp2Problem& pb, const DoubleExcitationIndex& d, const ThetaParams& theta,
                           const Estimate& e1, const EstimatorConfig& cfg) {
  Evaluation ev(pb, theta, cfg);
  return ev.residual(d, e1);
}

EnergyBreakdown mp2_energy(const Omp2Problem& pb, const ThetaParams& theta, const EstimatorConfig& cfg) {
  Evaluation ev(pb, theta, cfg);
  EnergyBreakdown out;
  out.theta = theta.unique;
  out.e_core = pb.e_core();
  out.warnings = pb.warnings();
  const Eigen::VectorXd& eps = pb.eps();
  for (int i = 0; i < pb.n_electrons(); ++i) out.e0 += eps(i);

  Estimates a = ev.e1();
  out.e1 = a.e1.value;
  out.e1_variance = a.e1.variance;
  out.group_kept_fraction = a.kept;

  double var_e2 = 0.0;
  for (const auto& d : pb.doubles()) {
    if (cfg.skip_spin_forbidden && !d.spin_conserving()) continue;
    Estimate r = ev.residual(d, a.e1);
    out.doubles.push_back(d);
    out.residuals.push_back(r.value);
    out.residual_variances.push_back(r.variance);
    const double delta = eps(d.i) + eps(d.j) - eps(d.a) - eps(d.b);
    if (std::abs(delta) < 1e-8) {
      std::ostringstream os;
      os << "degenerate denominator skipped for double (" << d.i << "," << d.j << "," << d.a << "," << d.b << ")";
      out.warnings.push_back(os.str());
      continue;
    }
    out.e2 += r.value * r.value / delta;
    var_e2 += std::pow(2.0 * r.value / delta, 2) * r.variance;
  }
  out.total = out.e0 + out.e1 + out.e2;
  out.variance = out.e1_variance + var_e2;
  out.circuits = ev.circuits;
  out.kept_fraction_mean = ev.circuits ? ev.kept_sum / static_cast<double>(ev.circuits) : 1.0;
  const long circuits_a = ev.circuits - ev.circuits_b;
  out.kept_fraction_a = circuits_a ? (ev.kept_sum - ev.kept_sum_b) / static_cast<double>(circuits_a) : 1.0;
  out.kept_fraction_b = ev.circuits_b ? ev.kept_sum_b / static_cast<double>(ev.circuits_b) : 1.0;
  return out;
}

long circuit_count(const Omp2Problem& pb, bool skip_spin_forbidden) {
  long d = 0;
  for (const auto& x : pb.doubles())
    if (!skip_spin_forbidden || x.spin_conserving()) ++d;
  return (1 + 2 * d) * pb.group_count();
}

Eigen::VectorXd energy_gradient(const Omp2Problem& pb, const ThetaParams& theta, const EstimatorConfig& cfg,
                                double step, int* evaluations) {
  Eigen::VectorXd g(theta.unique.size());
  for (size_t k = 0; k < theta.unique.size(); ++k) {
    ThetaParams plus = theta, minus = theta;
    plus.unique[k] += step;
    minus.unique[k] -= step;
    g(k) = (mp2_energy(pb, plus, cfg).total - mp2_energy(pb, minus, cfg).total) / (2.0 * step);
    if (evaluations) *evaluations += 2;
  }
  return g;
}

namespace {

Eigen::VectorXd as_vector(const ThetaParams& t) {
  return Eigen::Map<const Eigen::VectorXd>(t.unique.data(), static_cast<Eigen::Index>(t.unique.size()));
}

ThetaParams with_values(ThetaParams t, const Eigen::VectorXd& x) {
  for (Eigen::Index k = 0; k < x.size(); ++k) t.unique[k] = x(k);
  return t;
}

OptimizeResult bfgs(const Omp2Problem& pb, const EstimatorConfig& cfg, const OptimizerSettings& opt) {
  OptimizeResult res;
  ThetaParams theta = pb.zero_theta();
  const Eigen::Index n = static_cast<Eigen::Index>(theta.unique.size());
  EnergyBreakdown cur = mp2_energy(pb, theta, cfg);
  res.evaluations = 1;
  Eigen::VectorXd x = as_vector(theta);
  Eigen::VectorXd g = energy_gradient(pb, theta, cfg, opt.fd_step, &res.evaluations);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);

  for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
    if (g.norm() < opt.gradient_tol) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd dir = -hinv * g;
    if (dir.dot(g) >= 0.0) {
      hinv.setIdentity();
      dir = -g;
    }
    // Backtracking line search with the Armijo condition.
    double step = 1.0;
    EnergyBreakdown trial;
    Eigen::VectorXd xn;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      xn = x + step * dir;
      trial = mp2_energy(pb, with_values(theta, xn), cfg);
      ++res.evaluations;
      if (trial.total <= cur.total + 1e-4 * step * g.dot(dir)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no descent at this resolution; reported as non-converged
    const double de = cur.total - trial.total;
    Eigen::VectorXd gn = energy_gradient(pb, with_values(theta, xn), cfg, opt.fd_step, &res.evaluations);
    Eigen::VectorXd s = xn - x, y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-14) {
      const double rho = 1.0 / sy;
      Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
      hinv = (id - rho * s * y.transpose()) * hinv * (id - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    x = xn;
    g = gn;
    cur = trial;
    if (std::abs(de) < opt.energy_tol) {
      res.converged = true;
      ++res.iterations;
      break;
    }
  }
  res.theta = with_values(theta, x);
  res.energy = cur;
  res.gradient_norm = g.norm();
  return res;
}

OptimizeResult nelder_mead(const Omp2Problem& pb, const EstimatorConfig& cfg, const OptimizerSettings& opt) {
  OptimizeResult res;
  ThetaParams theta = pb.zero_theta();
  const Eigen::Index n = static_cast<Eigen::Index>(theta.unique.size());
  auto eval = [&](const Eigen::VectorXd& x) {
    ++res.evaluations;
    return mp2_energy(pb, with_values(theta, x), cfg);
  };
  std::vector<Eigen::VectorXd> pts;
  std::vector<EnergyBreakdown> val;
  pts.push_back(Eigen::VectorXd::Zero(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    p(k) = opt.simplex_step;
    pts.push_back(p);
  }
  for (const auto& p : pts) val.push_back(eval(p));

  for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
    std::vector<size_t> order(pts.size());
    for (size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return val[a].total < val[b].total; });
    std::vector<Eigen::VectorXd> sp;
    std::vector<EnergyBreakdown> sv;
    for (size_t k : order) {
      sp.push_back(pts[k]);
      sv.push_back(val[k]);
    }
    pts = sp;
    val = sv;
    if (val.back().total - val.front().total < opt.energy_tol) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (size_t k = 0; k + 1 < pts.size(); ++k) centroid += pts[k];
    centroid /= static_cast<double>(n);
    Eigen::VectorXd xr = centroid + (centroid - pts.back());
    EnergyBreakdown fr = eval(xr);
    if (fr.total < val.front().total) {
      Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts.back());
      EnergyBreakdown fe = eval(xe);
      if (fe.total < fr.total) {
        pts.back() = xe;
        val.back() = fe;
      } else {
        pts.back() = xr;
        val.back() = fr;
      }
      continue;
    }
    if (fr.total < val[val.size() - 2].total) {
      pts.back() = xr;
      val.back() = fr;
      continue;
    }
    Eigen::VectorXd xc = centroid + 0.5 * (pts.back() - centroid);
    EnergyBreakdown fc = eval(xc);
    if (fc.total < val.back().total) {
      pts.back() = xc;
      val.back() = fc;
      continue;
    }
    for (size_t k = 1; k < pts.size(); ++k) {
      pts[k] = pts[0] + 0.5 * (pts[k] - pts[0]);
      val[k] = eval(pts[k]);
    }
  }
  size_t best = 0;
  for (size_t k = 1; k < val.size(); ++k)
    if (val[k].total < val[best].total) best = k;
  res.theta = with_values(theta, pts[best]);
  res.energy = val[best];
  return res;
}

}  // namespace

OptimizeResult optimize(const Omp2Problem& pb, const EstimatorConfig& cfg, const OptimizerSettings& opt) {
  if (cfg.mode == EstimatorMode::kExact) return bfgs(pb, cfg, opt);
  return nelder_mead(pb, cfg, opt);
}

}  // namespace nomp2
