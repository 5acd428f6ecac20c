// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#include "nomp2/simulator.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <limits>

#include "nomp2/error.hpp"

namespace nomp2 {

namespace {

uint64_t splitmix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t mix(uint64_t h, uint64_t k) { return splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL)); }

using cplx = std::complex<double>;

void apply_1q(Eigen::VectorXcd& a, int q, const cplx m[2][2]) {
  const uint32_t bit = 1u << q;
  const uint32_t dim = static_cast<uint32_t>(a.size());
  for (uint32_t b = 0; b < dim; ++b) {
    if (b & bit) continue;
    cplx x0 = a[b], x1 = a[b | bit];
    a[b] = m[0][0] * x0 + m[0][1] * x1;
    a[b | bit] = m[1][0] * x0 + m[1][1] * x1;
  }
}

void apply_x(Eigen::VectorXcd& a, int q) {
  const uint32_t bit = 1u << q;
  for (uint32_t b = 0; b < a.size(); ++b)
    if (!(b & bit)) std::swap(a[b], a[b | bit]);
}

void apply_z(Eigen::VectorXcd& a, int q) {
  const uint32_t bit = 1u << q;
  for (uint32_t b = 0; b < a.size(); ++b)
    if (b & bit) a[b] = -a[b];
}

void apply_y(Eigen::VectorXcd& a, int q) {
  const uint32_t bit = 1u << q;
  const cplx i(0.0, 1.0);
  for (uint32_t b = 0; b < a.size(); ++b) {
    if (b & bit) continue;
    cplx x0 = a[b], x1 = a[b | bit];
    a[b] = -i * x1;
    a[b | bit] = i * x0;
  }
}

void apply_pauli(Eigen::VectorXcd& a, int q, int which) {
  switch (which) {
    case 1: apply_x(a, q); break;
    case 2: apply_y(a, q); break;
    case 3: apply_z(a, q); break;
    default: break;
  }
}

}  // namespace

Rng::Rng(uint64_t seed, std::initializer_list<uint64_t> keys) : key_(splitmix64(seed)) {
  for (uint64_t k : keys) key_ = mix(key_, k);
  std::seed_seq seq{static_cast<uint32_t>(key_), static_cast<uint32_t>(key_ >> 32)};
  engine_.seed(seq);
}

Rng Rng::split(uint64_t key) const { return split({key}); }

Rng Rng::split(std::initializer_list<uint64_t> keys) const {
  Rng child(0);
  child.key_ = key_;
  for (uint64_t k : keys) child.key_ = mix(child.key_, k);
  std::seed_seq seq{static_cast<uint32_t>(child.key_), static_cast<uint32_t>(child.key_ >> 32)};
  child.engine_.seed(seq);
  return child;
}

uint64_t Rng::below(uint64_t n) {
  // Rejection sampling for an unbiased draw.
  const uint64_t limit = std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % n;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

uint64_t Rng::binomial(uint64_t n, double p) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::binomial_distribution<uint64_t> d(n, p);
  return d(engine_);
}

uint64_t default_seed() {
  if (const char* env = std::getenv("NOMP2_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && end != env) return v;
    throw Error(ErrorKind::kUsage, "NOMP2_SEED must be an unsigned integer");
  }
  return 12345;
}

StateVector StateVector::basis(int n_qubits, uint32_t bits) {
  if (n_qubits < 0 || n_qubits > 24) throw Error(ErrorKind::kCapacity, "statevector limited to 24 qubits");
  StateVector s;
  s.n_qubits = n_qubits;
  s.amplitudes = Eigen::VectorXcd::Zero(Eigen::Index{1} << n_qubits);
  s.amplitudes[bits] = 1.0;
  return s;
}

void NoiseModel::validate() const {
  for (double p : {p1, p2, p_readout})
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::kInput, "noise probabilities must lie in [0,1]");
}

std::string default_noise_preset_path() {
  if (const char* env = std::getenv("NOMP2_NOISE_PRESETS")) return env;
  return std::string(NOMP2_DATA_DIR) + "/noise_presets.json";
}

namespace {

nlohmann::json read_presets(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kInput, "cannot open noise preset file '" + path + "'");
  try {
    return nlohmann::json::parse(f).at("presets");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, path + ": " + e.what());
  }
}

}  // namespace

NoiseModel load_noise_preset(const std::string& path, const std::string& name) {
  nlohmann::json presets = read_presets(path);
  if (!presets.contains(name)) throw Error(ErrorKind::kUsage, "unknown noise preset '" + name + "'");
  const auto& p = presets.at(name);
  NoiseModel m;
  m.name = name;
  try {
    m.p1 = p.at("p1").get<double>();
    m.p2 = p.at("p2").get<double>();
    m.p_readout = p.at("p_readout").get<double>();
    m.seed = p.value("seed", default_seed());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, "preset '" + name + "': " + e.what());
  }
  m.validate();
  return m;
}

std::vector<std::string> list_noise_presets(const std::string& path) {
  std::vector<std::string> out;
  for (const auto& [k, v] : read_presets(path).items()) out.push_back(k);
  return out;
}

uint64_t ShotTable::kept() const {
  uint64_t k = 0;
  for (const auto& [b, c] : counts) k += c;
  return k;
}

std::string bitstring(uint32_t bits, int n_qubits) {
  std::string s(n_qubits, '0');
  for (int q = 0; q < n_qubits; ++q)
    if ((bits >> q) & 1u) s[q] = '1';
  return s;
}

uint32_t parse_bitstring(const std::string& s) {
  uint32_t b = 0;
  for (size_t q = 0; q < s.size(); ++q) {
    if (s[q] == '1')
      b |= 1u << q;
    else if (s[q] != '0')
      throw Error(ErrorKind::kParse, "bitstring must contain only 0 and 1");
  }
  return b;
}

void apply_gate(StateVector& s, const Gate& g) {
  Eigen::VectorXcd& a = s.amplitudes;
  switch (g.kind) {
    case GateKind::kX: apply_x(a, g.q[0]); break;
    case GateKind::kH: {
      const double r = 1.0 / std::sqrt(2.0);
      const cplx m[2][2] = {{r, r}, {r, -r}};
      apply_1q(a, g.q[0], m);
      break;
    }
    case GateKind::kRY: {
      const double c = std::cos(g.angle / 2), sn = std::sin(g.angle / 2);
      const cplx m[2][2] = {{c, -sn}, {sn, c}};
      apply_1q(a, g.q[0], m);
      break;
    }
    case GateKind::kRZ: {
      const cplx e0 = std::polar(1.0, -g.angle / 2), e1 = std::polar(1.0, g.angle / 2);
      const cplx m[2][2] = {{e0, 0.0}, {0.0, e1}};
      apply_1q(a, g.q[0], m);
      break;
    }
    case GateKind::kCNOT: {
      const uint32_t c = 1u << g.q[0], t = 1u << g.q[1];
      for (uint32_t b = 0; b < a.size(); ++b)
        if ((b & c) && !(b & t)) std::swap(a[b], a[b | t]);
      break;
    }
    case GateKind::kCZ: {
      const uint32_t m = (1u << g.q[0]) | (1u << g.q[1]);
      for (uint32_t b = 0; b < a.size(); ++b)
        if ((b & m) == m) a[b] = -a[b];
      break;
    }
    case GateKind::kMultiCRY: {
      const uint32_t m = (1u << g.q[0]) | (1u << g.q[1]) | (1u << g.q[2]);
      const uint32_t t = 1u << g.q[3];
      const double c = std::cos(g.angle / 2), sn = std::sin(g.angle / 2);
      for (uint32_t b = 0; b < a.size(); ++b) {
        if ((b & m) != m || (b & t)) continue;
        cplx x0 = a[b], x1 = a[b | t];
        a[b] = c * x0 - sn * x1;
        a[b | t] = sn * x0 + c * x1;
      }
      break;
    }
  }
}

StateVector run(const Circuit& c, const StateVector& initial, const NoiseModel* noise, Rng* rng) {
  if (c.n_qubits != initial.n_qubits) throw Error(ErrorKind::kInput, "circuit and state sizes differ");
  StateVector s = initial;
  const bool noisy = noise && noise->gate_noise();
  if (noisy && !rng) throw Error(ErrorKind::kInput, "noisy execution requires an RNG stream");
  const Circuit& lowered_ref = c;
  Circuit lowered;
  bool has_multi = false;
  for (const Gate& g : c.gates) has_multi |= g.kind == GateKind::kMultiCRY;
  if (has_multi) lowered = lower(c);
  const Circuit& exec = has_multi ? lowered : lowered_ref;
  for (const Gate& g : exec.gates) {
    apply_gate(s, g);
    if (!noisy) continue;
    const double p = g.nq == 1 ? noise->p1 : noise->p2;
    if (p <= 0.0 || rng->uniform() >= p) continue;
    if (g.nq == 1) {
      apply_pauli(s.amplitudes, g.q[0], 1 + static_cast<int>(rng->below(3)));
    } else {
      int which = 1 + static_cast<int>(rng->below(15));
      apply_pauli(s.amplitudes, g.q[0], which / 4);
      apply_pauli(s.amplitudes, g.q[1], which % 4);
    }
  }
  return s;
}

ShotTable sample_probabilities(const std::vector<double>& probs, int n_qubits, uint64_t shots,
                               const NoiseModel* noise, Rng& rng) {
  if (shots == 0) throw Error(ErrorKind::kUsage, "shots must be at least 1");
  ShotTable t;
  t.n_qubits = n_qubits;
  t.shots = shots;
  double total = 0.0;
  for (double p : probs) total += p;
  double rest = total;
  uint64_t left = shots;
  for (uint32_t b = 0; b < probs.size() && left > 0; ++b) {
    if (probs[b] <= 0.0) continue;
    uint64_t k = (rest <= probs[b]) ? left : rng.binomial(left, probs[b] / rest);
    rest -= probs[b];
    if (k) t.counts[b] += k;
    left -= k;
  }
  if (left > 0) t.counts.rbegin()->second += left;  // rounding leftovers
  if (noise && noise->p_readout > 0.0) {
    for (int q = 0; q < n_qubits; ++q) {
      std::map<uint32_t, uint64_t> next;
      for (const auto& [b, c] : t.counts) {
        uint64_t flips = rng.binomial(c, noise->p_readout);
        if (c - flips) next[b] += c - flips;
        if (flips) next[b ^ (1u << q)] += flips;
      }
      t.counts.swap(next);
    }
  }
  return t;
}

ShotTable sample(const StateVector& s, uint64_t shots, const NoiseModel* noise, Rng& rng) {
  std::vector<double> probs(s.amplitudes.size());
  for (Eigen::Index b = 0; b < s.amplitudes.size(); ++b) probs[b] = std::norm(s.amplitudes[b]);
  return sample_probabilities(probs, s.n_qubits, shots, noise, rng);
}

ShotTable postselect(const ShotTable& t, int n_electrons) {
  ShotTable out;
  out.n_qubits = t.n_qubits;
  out.shots = t.shots;
  out.postselected = true;
  for (const auto& [b, c] : t.counts)
    if (std::popcount(b) == n_electrons) out.counts[b] = c;
  out.kept_fraction = t.shots ? static_cast<double>(out.kept()) / static_cast<double>(t.shots) : 0.0;
  return out;
}

Estimate expectation_with_variance(const ShotTable& t, const std::vector<double>& coeff) {
  const uint64_t k = t.kept();
  if (k == 0) throw Error(ErrorKind::kEmptyTable, "no shots survived post-selection");
  double sum = 0.0;
  for (const auto& [b, c] : t.counts) sum += static_cast<double>(c) * coeff.at(b);
  const double mean = sum / static_cast<double>(k);
  double ss = 0.0;
  for (const auto& [b, c] : t.counts) {
    double d = coeff.at(b) - mean;
    ss += static_cast<double>(c) * d * d;
  }
  Estimate e;
  e.value = mean;
  e.variance = k > 1 ? ss / static_cast<double>(k - 1) / static_cast<double>(k) : 0.0;
  return e;
}

double exact_expectation(const StateVector& s, const std::vector<double>& coeff) {
  double v = 0.0;
  for (Eigen::Index b = 0; b < s.amplitudes.size(); ++b) v += std::norm(s.amplitudes[b]) * coeff[b];
  return v;
}

FidelityEstimate trajectory_fidelity(const StateVector& ideal, const Circuit& c, const StateVector& initial,
                                     const NoiseModel& noise, int n_traj, std::optional<int> postselect_n,
                                     const Rng& rng) {
  if (n_traj < 1) throw Error(ErrorKind::kInput, "need at least one trajectory");
  Circuit lowered = lower(c);
  Eigen::VectorXcd ideal_proj = ideal.amplitudes;
  if (postselect_n) {
    for (Eigen::Index b = 0; b < ideal_proj.size(); ++b)
      if (std::popcount(static_cast<uint32_t>(b)) != *postselect_n) ideal_proj[b] = 0.0;
  }
  const double ideal_w = ideal_proj.squaredNorm();

  FidelityEstimate est;
  est.n_traj = n_traj;
  for (int t = 0; t < n_traj; ++t) {
    Rng stream = rng.split(static_cast<uint64_t>(t));
    StateVector s = run(lowered, initial, &noise, &stream);
    if (!postselect_n) {
      est.fidelity.push_back(std::norm(ideal.amplitudes.dot(s.amplitudes)));
      est.weight.push_back(1.0);
      continue;
    }
    Eigen::VectorXcd proj = s.amplitudes;
    for (Eigen::Index b = 0; b < proj.size(); ++b)
      if (std::popcount(static_cast<uint32_t>(b)) != *postselect_n) proj[b] = 0.0;
    const double w = proj.squaredNorm();
    const double overlap = (w > 0.0 && ideal_w > 0.0) ? std::norm(ideal_proj.dot(proj)) / (w * ideal_w) : 0.0;
    est.fidelity.push_back(overlap);
    est.weight.push_back(w);
  }
  double sw = 0.0, swf = 0.0;
  for (int t = 0; t < n_traj; ++t) {
    sw += est.weight[t];
    swf += est.weight[t] * est.fidelity[t];
  }
  if (sw <= 0.0) {
    est.mean = std::numeric_limits<double>::quiet_NaN();
    est.std_error = std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  est.mean = swf / sw;
  // Linearized standard error of the ratio estimator.
  const double wbar = sw / n_traj;
  double var = 0.0;
  for (int t = 0; t < n_traj; ++t) {
    double z = est.weight[t] * (est.fidelity[t] - est.mean) / wbar;
    var += z * z;
  }
  est.std_error = n_traj > 1 ? std::sqrt(var / (n_traj - 1) / n_traj) : 0.0;
  return est;
}

}  // namespace nomp2
