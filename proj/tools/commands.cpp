// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <future>
#include <json.hpp>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "nomp2/error.hpp"
#include "nomp2/oracle.hpp"
#include "nomp2/simulator.hpp"

namespace nomp2::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Point {
  std::string molecule;
  double distance = kNaN;
  bool has_ref = false;
  ReferenceRecord ref;
  MolecularIntegrals mi;
};

std::string fmt(double v, const char* spec = "%.12f") {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string join(const std::vector<double>& v, char sep) {
  std::string s;
  for (size_t k = 0; k < v.size(); ++k) {
    if (k) s += sep;
    s += fmt(v[k], "%.10e");
  }
  return s;
}

Point resolve_fixture(const RunConfig& cfg) {
  if (cfg.fixture.empty()) throw Error(ErrorKind::kUsage, "--fixture is required");
  if (!fs::exists(cfg.fixture)) throw Error(ErrorKind::kInput, "fixture not found: " + cfg.fixture);
  Point pt;
  fs::path path(cfg.fixture);
  fs::path dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  std::string ref_file = reference_path(dir.string());
  if (fs::exists(ref_file) && cfg.frozen.empty() && cfg.deleted.empty()) {
    for (const auto& r : load_reference(ref_file)) {
      if (r.fcidump == path.filename().string()) {
        pt.has_ref = true;
        pt.ref = r;
        pt.molecule = r.molecule;
        pt.distance = r.distance_bohr;
        pt.mi = load_fixture(r, dir.string());
        return pt;
      }
    }
  }
  pt.molecule = path.stem().string();
  ActiveSpaceSpec spec{cfg.frozen, cfg.deleted};
  pt.mi = freeze_active_space(read_fcidump(cfg.fixture), spec);
  return pt;
}

std::vector<Point> resolve_directory(const RunConfig& cfg) {
  if (cfg.fixture_dir.empty()) throw Error(ErrorKind::kUsage, "--fixture-dir is required");
  std::string ref_file = reference_path(cfg.fixture_dir);
  if (!fs::exists(ref_file)) throw Error(ErrorKind::kInput, "no reference.json in " + cfg.fixture_dir);
  std::vector<Point> pts;
  for (const auto& r : load_reference(ref_file)) {
    Point pt;
    pt.has_ref = true;
    pt.ref = r;
    pt.molecule = r.molecule;
    pt.distance = r.distance_bohr;
    pts.push_back(std::move(pt));
  }
  if (pts.empty()) throw Error(ErrorKind::kInput, "reference file lists no fixtures");
  return pts;
}

EstimatorConfig estimator_config(const RunConfig& cfg) {
  EstimatorConfig ec;
  ec.mode = cfg.mode;
  ec.shots = cfg.shots;
  ec.postselect = cfg.postselect;
  ec.tol = cfg.tol;
  ec.seed = cfg.seed;
  ec.trajectories = cfg.trajectories;
  ec.skip_spin_forbidden = cfg.skip_spin_forbidden;
  if (cfg.mode == EstimatorMode::kShots && cfg.shots == 0) throw Error(ErrorKind::kUsage, "--shots must be at least 1");
  if (!(cfg.tol > 0.0)) throw Error(ErrorKind::kUsage, "--tol must be positive");
  if (cfg.noise != "none") {
    if (cfg.mode != EstimatorMode::kShots) throw Error(ErrorKind::kUsage, "--noise requires --mode shots");
    std::string file = cfg.noise_file.empty() ? default_noise_preset_path() : cfg.noise_file;
    ec.noise = load_noise_preset(file, cfg.noise);
  }
  return ec;
}

struct Row {
  Point pt;
  EnergyBreakdown e;
  std::string status = "ok";
  int code = kOk;
  uint64_t shots = 0;
};

// Exact mode optimizes; shot mode evaluates at the supplied theta or at the
// exact-mode optimum, optionally refining with the simplex optimizer.
Row evaluate(Point pt, const RunConfig& cfg) {
  Row row;
  row.shots = cfg.mode == EstimatorMode::kShots ? cfg.shots : 0;
  try {
    if (!pt.has_ref || pt.mi.n_spatial == 0) {
      if (pt.has_ref) pt.mi = load_fixture(pt.ref, cfg.fixture_dir);
    }
    EstimatorConfig ec = estimator_config(cfg);
    Omp2Problem pb(pt.mi, cfg.tol);
    ThetaParams theta = pb.zero_theta();
    bool converged = true;
    if (cfg.mode == EstimatorMode::kExact) {
      OptimizeResult res = optimize(pb, ec);
      row.e = res.energy;
      converged = res.converged;
    } else {
      if (!cfg.theta.empty()) {
        if (cfg.theta.size() != theta.unique.size())
          throw Error(ErrorKind::kUsage, "--theta needs " + std::to_string(theta.unique.size()) + " values");
        theta.unique = cfg.theta;
      } else {
        EstimatorConfig exact = ec;
        exact.mode = EstimatorMode::kExact;
        exact.noise.reset();
        OptimizeResult pre = optimize(pb, exact);
        theta = pre.theta;
        converged = pre.converged;
      }
      if (cfg.shot_optimize) {
        OptimizeResult res = optimize(pb, ec);
        row.e = res.energy;
        converged = converged && res.converged;
      } else {
        row.e = mp2_energy(pb, theta, ec);
      }
    }
    if (!converged) {
      row.status = "not_converged";
      row.code = kConvergence;
    }
  } catch (const Error& err) {
    row.status = std::string("error: ") + err.what();
    row.code = exit_code_for(err.kind());
    row.e.e0 = row.e.e1 = row.e.e2 = row.e.total = row.e.variance = row.e.e_core = kNaN;
    row.e.kept_fraction_mean = kNaN;
  }
  row.pt = std::move(pt);
  return row;
}

const std::vector<std::string> kCurveColumns = {
    "molecule", "distance_bohr", "e_hf_ref", "e_mp2_ref", "e_omp2_ref", "e_fci_ref", "e0",
    "e1", "e2", "e_total", "variance", "shots", "noise_preset", "postselected", "kept_fraction_mean",
    "status", "theta"};

std::vector<std::string> curve_fields(const Row& r, const RunConfig& cfg) {
  const auto& ref = r.pt.ref;
  const bool h = r.pt.has_ref;
  std::string status = r.status;
  for (char& c : status)
    if (c == ',' || c == '\n') c = ';';
  return {r.pt.molecule,
          fmt(r.pt.distance, "%.4f"),
          fmt(h ? ref.e_hf : kNaN),
          fmt(h ? ref.e_mp2 : kNaN),
          fmt(h ? ref.e_omp2 : kNaN),
          fmt(h ? ref.e_fci : kNaN),
          fmt(r.e.e0 + r.e.e_core),
          fmt(r.e.e1),
          fmt(r.e.e2),
          fmt(r.e.total_with_core()),
          fmt(r.e.variance, "%.6e"),
          std::to_string(r.shots),
          cfg.noise,
          cfg.postselect ? "1" : "0",
          fmt(r.e.kept_fraction_mean, "%.8f"),
          status,
          join(r.e.theta, ';')};
}

void write_table(std::ostream& out, const RunConfig& cfg, const char* schema, const std::vector<std::string>& cols,
                 const std::vector<std::vector<std::string>>& rows, const std::vector<std::string>& footer = {}) {
  if (cfg.format == "json") {
    nlohmann::ordered_json doc;
    doc["schema"] = std::string(schema + 2);
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      nlohmann::ordered_json o;
      for (size_t k = 0; k < cols.size(); ++k) o[cols[k]] = r[k];
      arr.push_back(o);
    }
    doc["rows"] = arr;
    if (!footer.empty()) doc["checks"] = footer;
    out << doc.dump(1) << '\n';
    return;
  }
  out << schema << '\n';
  for (size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
  out << '\n';
  for (const auto& r : rows) {
    for (size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << r[k];
    out << '\n';
  }
  for (const auto& f : footer) out << "# " << f << '\n';
}

void summarize(std::ostream& log, const Row& r) {
  log << r.pt.molecule << " R=" << fmt(r.pt.distance, "%.2f") << " status=" << r.status << '\n'
      << "  E0+Ecore = " << fmt(r.e.e0 + r.e.e_core) << "  E1 = " << fmt(r.e.e1) << "  E2 = " << fmt(r.e.e2) << '\n'
      << "  E_total  = " << fmt(r.e.total_with_core()) << "  sigma = " << fmt(std::sqrt(r.e.variance), "%.3e")
      << "  circuits = " << r.e.circuits << '\n';
  if (r.pt.has_ref)
    log << "  reference HF " << fmt(r.pt.ref.e_hf) << "  MP2 " << fmt(r.pt.ref.e_mp2) << "  OMP2 "
        << fmt(r.pt.ref.e_omp2) << "  FCI " << fmt(r.pt.ref.e_fci) << '\n';
  for (const auto& w : r.e.warnings) log << "  warning: " << w << '\n';
}

void check_format(const RunConfig& cfg) {
  if (cfg.format != "csv" && cfg.format != "json") throw Error(ErrorKind::kUsage, "--format must be csv or json");
  if (cfg.jobs < 1) throw Error(ErrorKind::kUsage, "--jobs must be at least 1");
}

template <typename F>
auto run_points(std::vector<Point> pts, int jobs, F&& f) {
  using R = decltype(f(std::move(pts[0])));
  std::vector<R> out;
  for (size_t start = 0; start < pts.size(); start += static_cast<size_t>(jobs)) {
    std::vector<std::future<R>> batch;
    for (size_t k = start; k < std::min(pts.size(), start + jobs); ++k)
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, f, std::move(pts[k])));
    for (auto& b : batch) out.push_back(b.get());
  }
  return out;
}

struct SetFidelity {
  double raw = 0.0, ps = 0.0, raw_se = 0.0, diff = 0.0, diff_se = 0.0;
};

// Average over the set's circuits; raw and post-selected estimates share trajectories.
SetFidelity set_fidelity(const std::vector<Circuit>& circuits, int n_electrons, const NoiseModel& noise, int n_traj,
                         uint64_t seed, char set) {
  SetFidelity out;
  double var_raw = 0.0, var_diff = 0.0;
  for (size_t k = 0; k < circuits.size(); ++k) {
    const Circuit& c = circuits[k];
    StateVector zero = StateVector::basis(c.n_qubits);
    StateVector ideal = run(c, zero);
    Rng rng = Rng(seed).split({static_cast<uint64_t>('F'), static_cast<uint64_t>(set), k});
    FidelityEstimate raw = trajectory_fidelity(ideal, c, zero, noise, n_traj, std::nullopt, rng);
    FidelityEstimate ps = trajectory_fidelity(ideal, c, zero, noise, n_traj, n_electrons, rng);
    out.raw += raw.mean;
    out.ps += ps.mean;
    var_raw += raw.std_error * raw.std_error;
    double wbar = 0.0;
    for (double w : ps.weight) wbar += w;
    wbar /= n_traj;
    double s2 = 0.0;
    for (int t = 0; t < n_traj; ++t) {
      double z = (wbar > 0 ? ps.weight[t] * (ps.fidelity[t] - ps.mean) / wbar : 0.0) - (raw.fidelity[t] - raw.mean);
      s2 += z * z;
    }
    var_diff += n_traj > 1 ? s2 / (n_traj - 1) / n_traj : 0.0;
  }
  const double n = static_cast<double>(circuits.size());
  out.raw /= n;
  out.ps /= n;
  out.raw_se = std::sqrt(var_raw) / n;
  out.diff = out.ps - out.raw;
  out.diff_se = std::sqrt(var_diff) / n;
  return out;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return kUsage;
    case ErrorKind::kParse:
    case ErrorKind::kHeader:
    case ErrorKind::kConsistency:
    case ErrorKind::kInput: return kFixture;
    case ErrorKind::kConvergence: return kConvergence;
    case ErrorKind::kCapacity: return kCapacity;
    case ErrorKind::kEmptyTable: return kFailure;
  }
  return kFailure;
}

int cmd_energy(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  check_format(cfg);
  estimator_config(cfg);
  Point pt = resolve_fixture(cfg);
  RunConfig local = cfg;
  local.fixture_dir = fs::path(cfg.fixture).parent_path().string();
  Row row = evaluate(std::move(pt), local);
  summarize(log, row);
  write_table(out, cfg, kCurveSchema, kCurveColumns, {curve_fields(row, cfg)});
  return row.code;
}

int cmd_curve(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  check_format(cfg);
  estimator_config(cfg);
  std::vector<Point> pts = resolve_directory(cfg);
  std::vector<Row> rows = run_points(std::move(pts), cfg.jobs, [&cfg](Point p) { return evaluate(std::move(p), cfg); });
  std::vector<std::vector<std::string>> table;
  int code = kOk;
  for (const Row& r : rows) {
    summarize(log, r);
    table.push_back(curve_fields(r, cfg));
    if (r.code != kOk && code == kOk) code = r.code;
  }
  write_table(out, cfg, kCurveSchema, kCurveColumns, table);
  return code;
}

int cmd_resources(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  check_format(cfg);
  Point pt = resolve_fixture(cfg);
  Omp2Problem pb(pt.mi, cfg.tol);
  ThetaParams theta = pb.zero_theta();
  Eigen::MatrixXd th = expand_theta(theta, pb.n_spin());
  Eigen::MatrixXd u = th.exp();
  FactorizedPerturbation fp = pb.factorization(th);
  int depth_a = 0, depth_b = 0;
  for (int l = 0; l < pb.group_count(); ++l) {
    depth_a = std::max(depth_a, cnot_depth(set_a_circuit(pb, u, fp, l)).cnot_depth);
    for (const auto& d : pb.doubles())
      depth_b = std::max(depth_b, cnot_depth(set_b_circuit(pb, u, fp, l, d, std::numbers::pi / 4)).cnot_depth);
  }
  const long circuits = circuit_count(pb, cfg.skip_spin_forbidden);
  log << pt.molecule << ": " << pb.n_spin() << " qubits, " << theta.unique.size() << " parameters, max CNOT depth "
      << depth_a << " (set A) / " << depth_b << " (set B), " << pb.group_count() << " measurement groups, "
      << pb.doubles().size() << " doubles, " << circuits << " circuits\n";
  write_table(out, cfg, kResourceSchema,
              {"molecule", "qubits", "parameters", "groups", "doubles", "max_depth_a", "max_depth_b", "circuits"},
              {{pt.molecule, std::to_string(pb.n_spin()), std::to_string(theta.unique.size()),
                std::to_string(pb.group_count()), std::to_string(pb.doubles().size()), std::to_string(depth_a),
                std::to_string(depth_b), std::to_string(circuits)}});
  return kOk;
}

int cmd_noise_study(const RunConfig& cfg_in, std::ostream& out, std::ostream& log) {
  check_format(cfg_in);
  if (cfg_in.noise == "none") throw Error(ErrorKind::kUsage, "noise-study requires --noise");
  RunConfig cfg = cfg_in;
  cfg.mode = EstimatorMode::kShots;
  const EstimatorConfig base = estimator_config(cfg);
  const NoiseModel noise = *base.noise;
  std::vector<Point> pts = resolve_directory(cfg);

  struct StudyRow {
    std::vector<std::string> fields;
    bool ps_ok = true;
    bool depth_ok = true;
    int code = kOk;
  };
  auto study = [&](Point pt) {
    StudyRow sr;
    std::string status = "ok";
    double raw_e = kNaN, raw_v = kNaN, ps_e = kNaN, ps_v = kNaN, ka = kNaN, kb = kNaN;
    SetFidelity fa, fb;
    try {
      pt.mi = load_fixture(pt.ref, cfg.fixture_dir);
      Omp2Problem pb(pt.mi, cfg.tol);
      EstimatorConfig exact;
      exact.tol = cfg.tol;
      OptimizeResult opt = optimize(pb, exact);
      EstimatorConfig ec = base;
      ec.postselect = false;
      EnergyBreakdown raw = mp2_energy(pb, opt.theta, ec);
      ec.postselect = true;
      EnergyBreakdown ps = mp2_energy(pb, opt.theta, ec);
      raw_e = raw.total_with_core();
      raw_v = raw.variance;
      ps_e = ps.total_with_core();
      ps_v = ps.variance;
      ka = ps.kept_fraction_a;
      kb = ps.kept_fraction_b;

      Eigen::MatrixXd th = expand_theta(opt.theta, pb.n_spin());
      Eigen::MatrixXd u = th.exp();
      FactorizedPerturbation fp = pb.factorization(th);
      std::vector<Circuit> set_a, set_b;
      for (int l = 0; l < pb.group_count(); ++l) {
        set_a.push_back(set_a_circuit(pb, u, fp, l));
        for (const auto& d : pb.doubles())
          for (double w : {std::numbers::pi / 4, std::numbers::pi / 2}) set_b.push_back(set_b_circuit(pb, u, fp, l, d, w));
      }
      fa = set_fidelity(set_a, pb.n_electrons(), noise, cfg.trajectories, cfg.seed, 'A');
      fb = set_fidelity(set_b, pb.n_electrons(), noise, cfg.trajectories, cfg.seed, 'B');
      sr.ps_ok = fa.diff >= -1.645 * fa.diff_se && fb.diff >= -1.645 * fb.diff_se;
      sr.depth_ok = fb.raw <= fa.raw + 1.645 * std::hypot(fa.raw_se, fb.raw_se);
      if (!opt.converged) {
        status = "not_converged";
        sr.code = kConvergence;
      }
    } catch (const Error& err) {
      status = std::string("error: ") + err.what();
      for (char& c : status)
        if (c == ',' || c == '\n') c = ';';
      sr.code = exit_code_for(err.kind());
      sr.ps_ok = sr.depth_ok = false;
    }
    sr.fields = {pt.molecule,         fmt(pt.distance, "%.4f"), noise.name,
                 std::to_string(cfg.shots), std::to_string(cfg.trajectories), fmt(pt.ref.e_omp2),
                 fmt(raw_e),          fmt(raw_v, "%.6e"),       fmt(ps_e),
                 fmt(ps_v, "%.6e"),   fmt(ka, "%.8f"),          fmt(kb, "%.8f"),
                 fmt(fa.raw, "%.8f"), fmt(fa.ps, "%.8f"),       fmt(fb.raw, "%.8f"),
                 fmt(fb.ps, "%.8f"),  status};
    log << pt.molecule << " R=" << fmt(pt.distance, "%.2f") << " raw " << fmt(raw_e) << " ps " << fmt(ps_e)
        << " kept A/B " << fmt(ka, "%.4f") << "/" << fmt(kb, "%.4f") << " fidelity A " << fmt(fa.raw, "%.4f") << "->"
        << fmt(fa.ps, "%.4f") << " B " << fmt(fb.raw, "%.4f") << "->" << fmt(fb.ps, "%.4f") << '\n';
    return sr;
  };
  std::vector<StudyRow> rows = run_points(std::move(pts), cfg.jobs, study);
  std::vector<std::vector<std::string>> table;
  bool ps_ok = true, depth_ok = true;
  int code = kOk;
  for (const auto& r : rows) {
    table.push_back(r.fields);
    ps_ok = ps_ok && r.ps_ok;
    depth_ok = depth_ok && r.depth_ok;
    if (r.code != kOk && code == kOk) code = r.code;
  }
  std::vector<std::string> footer = {
      std::string("fidelity_ps >= fidelity_raw (one-sided 95%, sets A and B): ") + (ps_ok ? "PASS" : "FAIL"),
      std::string("fidelity_b <= fidelity_a (one-sided 95%): ") + (depth_ok ? "PASS" : "FAIL")};
  write_table(out, cfg, kNoiseSchema,
              {"molecule", "distance_bohr", "noise_preset", "shots", "trajectories", "e_omp2_ref", "e_total_raw",
               "variance_raw", "e_total_ps", "variance_ps", "kept_fraction_a", "kept_fraction_b", "fidelity_a",
               "fidelity_a_ps", "fidelity_b", "fidelity_b_ps", "status"},
              table, footer);
  return code;
}

}  // namespace nomp2::cli
