// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "nomp2/chem_io.hpp"
#include "nomp2/error.hpp"
#include "nomp2/oracle.hpp"
#include "nomp2/pauli_jw.hpp"
#include "test_support.hpp"

namespace nomp2 {
namespace {

using testing::fixture_at;
using testing::fixture_dir;
using testing::reference_at;

MolecularIntegrals parse(const std::string& text) {
  std::istringstream in(text);
  return parse_fcidump(in);
}

ErrorKind parse_error_kind(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ErrorKind::kUsage;
}

constexpr const char* kH2Text =
    " &FCI NORB=2, NELEC=2, MS2=0,\n  ORBSYM=1,1,\n  ISYM=1,\n &END\n"
    "  0.67   1 1 1 1\n  0.66   2 2 1 1\n  0.18   2 1 2 1\n  0.70   2 2 2 2\n"
    " -1.25   1 1 0 0\n -0.47   2 2 0 0\n  0.71   0 0 0 0\n";

TEST(ParseFcidump, SmallestValidFile) {
  MolecularIntegrals mi = parse(kH2Text);
  EXPECT_EQ(mi.n_spatial, 2);
  EXPECT_EQ(mi.n_electrons, 2);
  EXPECT_EQ(mi.ms2, 0);
  EXPECT_DOUBLE_EQ(mi.e_core, 0.71);
  EXPECT_DOUBLE_EQ(mi.h1(1, 1), -0.47);
  EXPECT_DOUBLE_EQ(mi.eri(1, 0, 1, 0), 0.18);
  EXPECT_DOUBLE_EQ(mi.eri(0, 1, 0, 1), 0.18);
  EXPECT_DOUBLE_EQ(mi.eri(0, 0, 1, 1), 0.66);
  EXPECT_LE(mi.eri.symmetry_error(), 1e-12);
}

TEST(ParseFcidump, OffsetOnlyFile) {
  MolecularIntegrals mi = parse("&FCI NORB=2,NELEC=2,MS2=0 /\n0.5 0 0 0 0\n");
  EXPECT_DOUBLE_EQ(mi.e_core, 0.5);
  EXPECT_EQ(mi.h1.norm(), 0.0);
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q)
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s) EXPECT_EQ(mi.eri(p, q, r, s), 0.0);
}

TEST(ParseFcidump, FortranExponents) {
  MolecularIntegrals mi = parse("&FCI NORB=1,NELEC=2 &END\n-1.5D+00 1 1 0 0\n2.5d-1 1 1 1 1\n");
  EXPECT_DOUBLE_EQ(mi.h1(0, 0), -1.5);
  EXPECT_DOUBLE_EQ(mi.eri(0, 0, 0, 0), 0.25);
}

TEST(ParseFcidump, MalformedRecordReportsLine) {
  try {
    parse("&FCI NORB=2,NELEC=2 &END\n0.5 1 1 1 1\n0.5 1 x 1 1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(ParseFcidump, IndexOutOfRangeIsParseError) {
  EXPECT_EQ(parse_error_kind("&FCI NORB=2,NELEC=2 &END\n0.5 3 1 1 1\n"), ErrorKind::kParse);
}

TEST(ParseFcidump, MissingHeaderFields) {
  EXPECT_EQ(parse_error_kind("&FCI NELEC=2 &END\n0.5 0 0 0 0\n"), ErrorKind::kHeader);
  EXPECT_EQ(parse_error_kind("&FCI NORB=2 &END\n0.5 0 0 0 0\n"), ErrorKind::kHeader);
  EXPECT_EQ(parse_error_kind("0.5 0 0 0 0\n"), ErrorKind::kHeader);
}

TEST(ParseFcidump, ConflictingDuplicates) {
  EXPECT_EQ(parse_error_kind("&FCI NORB=2,NELEC=2 &END\n0.5 2 1 1 1\n0.6 1 2 1 1\n"), ErrorKind::kConsistency);
  EXPECT_NO_THROW(parse("&FCI NORB=2,NELEC=2 &END\n0.5 2 1 1 1\n0.5 1 1 1 2\n"));
}

TEST(Validate, RejectsOpenShell) {
  MolecularIntegrals mi = parse(kH2Text);
  mi.ms2 = 2;
  EXPECT_THROW(validate(mi), Error);
  mi.ms2 = 0;
  mi.n_electrons = 3;
  EXPECT_THROW(validate(mi), Error);
}

TEST(ParseFcidump, H2FixtureFciMatchesOracle) {
  ReferenceRecord ref = reference_at("h2", 1.4);
  MolecularIntegrals mi = read_fcidump(fixture_dir("h2") + "/" + ref.fcidump);
  EXPECT_NEAR(fci_energy(spin_orbitalize(mi), mi.n_electrons, mi.e_core), ref.e_fci, 1e-8);
}

TEST(FreezeActiveSpace, EmptySpecIsIdentity) {
  MolecularIntegrals mi = fixture_at("h4", 2.0);
  MolecularIntegrals out = freeze_active_space(mi, {});
  EXPECT_EQ(out.n_spatial, mi.n_spatial);
  EXPECT_EQ(out.n_electrons, mi.n_electrons);
  EXPECT_EQ(out.e_core, mi.e_core);
  EXPECT_EQ((out.h1 - mi.h1).norm(), 0.0);
  EXPECT_EQ(out.eri.symmetry_error(), mi.eri.symmetry_error());
  EXPECT_EQ(out.eri(0, 1, 2, 3), mi.eri(0, 1, 2, 3));
}

TEST(FreezeActiveSpace, LithiumHydrideEmbedding) {
  ReferenceRecord ref = reference_at("lih", 3.1);
  MolecularIntegrals full = read_fcidump(fixture_dir("lih") + "/" + ref.fcidump);
  EXPECT_EQ(full.n_spatial, 6);
  EXPECT_EQ(full.n_electrons, 4);
  MolecularIntegrals act = freeze_active_space(full, {{0}, {3, 4}});
  EXPECT_EQ(act.n_spatial, 3);
  EXPECT_EQ(act.n_electrons, 2);
  EXPECT_EQ(spin_orbitalize(act).n_spin, 6);
}

TEST(FreezeActiveSpace, HartreeFockEnergyPreserved) {
  for (double r : {1.9, 3.1, 5.7}) {
    ReferenceRecord ref = reference_at("lih", r);
    MolecularIntegrals full = read_fcidump(fixture_dir("lih") + "/" + ref.fcidump);
    double e_full = hf_energy(spin_orbitalize(full), full.n_electrons, full.e_core);
    for (ActiveSpaceSpec spec : {ActiveSpaceSpec{{0}, {}}, ActiveSpaceSpec{{0}, {3, 4}}, ActiveSpaceSpec{{}, {5}}}) {
      MolecularIntegrals act = freeze_active_space(full, spec);
      EXPECT_NEAR(hf_energy(spin_orbitalize(act), act.n_electrons, act.e_core), e_full, 1e-8);
    }
    EXPECT_NEAR(e_full, ref.e_hf, 1e-8);
  }
}

TEST(FreezeActiveSpace, Errors) {
  MolecularIntegrals mi = fixture_at("h2", 1.4);
  EXPECT_THROW(freeze_active_space(mi, {{5}, {}}), Error);
  EXPECT_THROW(freeze_active_space(mi, {{0}, {}}), Error);
  EXPECT_THROW(freeze_active_space(mi, {{}, {0, 1}}), Error);
  EXPECT_THROW(freeze_active_space(mi, {{1}, {1}}), Error);
}

TEST(SpinOrbitalize, SingleOrbital) {
  MolecularIntegrals mi;
  mi.n_spatial = 1;
  mi.h1 = Eigen::MatrixXd::Constant(1, 1, -1.0);
  mi.eri = Eri(1);
  mi.n_electrons = 2;
  SpinIntegrals si = spin_orbitalize(mi);
  EXPECT_EQ(si.n_spin, 2);
  CMatrix h = operator_matrix(jw_map(hamiltonian_operator(si), si.n_spin), 2);
  CMatrix n = operator_matrix(jw_map(number_operator(2), 2), 2);
  EXPECT_LE((h + n).norm(), 1e-14);
}

TEST(SpinOrbitalize, H2FciMatchesOracle) {
  ReferenceRecord ref = reference_at("h2", 1.4);
  MolecularIntegrals mi = fixture_at("h2", 1.4);
  SpinIntegrals si = spin_orbitalize(mi);
  CMatrix h = operator_matrix(jw_map(hamiltonian_operator(si), si.n_spin), si.n_spin);
  std::vector<uint32_t> idx = weight_sector(si.n_spin, mi.n_electrons);
  CMatrix block(idx.size(), idx.size());
  for (size_t a = 0; a < idx.size(); ++a)
    for (size_t b = 0; b < idx.size(); ++b) block(a, b) = h(idx[a], idx[b]);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(block);
  EXPECT_NEAR(es.eigenvalues()(0) + mi.e_core, ref.e_fci, 1e-8);
  EXPECT_LE((h - h.adjoint()).norm(), 1e-12);
}

TEST(SpinOrbitalize, RelabelingKeepsSpectrum) {
  MolecularIntegrals mi = fixture_at("h3p", 2.0);
  const int m = mi.n_spatial;
  std::vector<int> perm = {2, 0, 1};
  MolecularIntegrals pm = mi;
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q) {
      pm.h1(p, q) = mi.h1(perm[p], perm[q]);
      for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s) pm.eri.at(p, q, r, s) = mi.eri(perm[p], perm[q], perm[r], perm[s]);
    }
  SpinIntegrals a = spin_orbitalize(mi), b = spin_orbitalize(pm);
  auto spectrum = [](const SpinIntegrals& si) {
    CMatrix h = operator_matrix(jw_map(hamiltonian_operator(si), si.n_spin), si.n_spin);
    return Eigen::SelfAdjointEigenSolver<CMatrix>(h).eigenvalues().eval();
  };
  EXPECT_LE((spectrum(a) - spectrum(b)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(fci_energy(a, 2, 0.0), fci_energy(b, 2, 0.0), 1e-10);
}

TEST(OrbitalEnergies, NonInteractingLimit) {
  MolecularIntegrals mi = fixture_at("h3p", 2.0);
  mi.eri = Eri(mi.n_spatial);
  SpinIntegrals si = spin_orbitalize(mi);
  Eigen::VectorXd eps = orbital_energies(si, 2);
  for (int p = 0; p < si.n_spin; ++p) EXPECT_DOUBLE_EQ(eps(p), si.h1s(p, p));
}

TEST(OrbitalEnergies, MatchOracleAndSpinDegenerate) {
  for (const char* mol : {"h2", "h3p", "lih", "h4"}) {
    for (const auto& ref : load_reference(reference_path(fixture_dir(mol)))) {
      MolecularIntegrals mi = load_fixture(ref, fixture_dir(mol));
      SpinIntegrals si = spin_orbitalize(mi);
      std::vector<std::string> warnings;
      Eigen::VectorXd eps = orbital_energies(si, mi.n_electrons, &warnings);
      for (int m = 0; m < mi.n_spatial; ++m) {
        EXPECT_NEAR(eps(2 * m), eps(2 * m + 1), 1e-12);
        EXPECT_NEAR(eps(2 * m), ref.orbital_energies[m], 1e-8) << mol << " R=" << ref.distance_bohr;
      }
      EXPECT_TRUE(warnings.empty()) << mol << " R=" << ref.distance_bohr;
      EXPECT_NEAR(hf_energy(si, mi.n_electrons, mi.e_core), ref.e_hf, 1e-8) << mol;
    }
  }
}

TEST(OrbitalEnergies, WarnsOnNonAufbau) {
  MolecularIntegrals mi = fixture_at("h2", 1.4);
  std::swap(mi.h1(0, 0), mi.h1(1, 1));
  mi.eri = Eri(2);
  std::vector<std::string> warnings;
  orbital_energies(spin_orbitalize(mi), 2, &warnings);
  EXPECT_FALSE(warnings.empty());
}

TEST(OrbitalEnergies, BrillouinOffDiagonalVanishes) {
  for (const char* mol : {"h2", "h3p", "lih", "h4"}) {
    for (const auto& ref : load_reference(reference_path(fixture_dir(mol)))) {
    MolecularIntegrals mi = load_fixture(ref, fixture_dir(mol));
    SpinIntegrals si = spin_orbitalize(mi);
    const int n = si.n_spin, ne = mi.n_electrons;
    for (int i = 0; i < ne; ++i)
      for (int a = ne; a < n; ++a) {
        double f = si.h1s(a, i);
        for (int k = 0; k < ne; ++k) f += si.v2s(a, k, k, i) - si.v2s(a, k, i, k);
        EXPECT_NEAR(f, 0.0, 1e-6) << mol;
      }
    }
  }
}

TEST(BuildPerturbation, ZeroThetaGivesDiagonalFock) {
  MolecularIntegrals mi = fixture_at("h3p", 2.0);
  SpinIntegrals si = spin_orbitalize(mi);
  Eigen::VectorXd eps = orbital_energies(si, 2);
  Perturbation pt = build_perturbation(si, eps, Eigen::MatrixXd::Zero(6, 6));
  Eigen::MatrixXd expected = si.h1s;
  expected.diagonal() -= eps;
  EXPECT_LE((pt.t - expected).norm(), 1e-14);
  EXPECT_LE((pt.u - Eigen::MatrixXd::Identity(6, 6)).norm(), 1e-14);
}

TEST(BuildPerturbation, FockPlusPerturbationIsHamiltonian) {
  MolecularIntegrals mi = fixture_at("h4", 2.6);
  SpinIntegrals si = spin_orbitalize(mi);
  Eigen::VectorXd eps = orbital_energies(si, mi.n_electrons);
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(8, 8);
  theta(0, 5) = 0.3;
  theta(1, 4) = -0.2;
  theta(2, 7) = 0.11;
  theta = (theta - theta.transpose()).eval();
  Perturbation pt = build_perturbation(si, eps, theta);
  Eigen::MatrixXd fock = pt.u * eps.asDiagonal() * pt.u.transpose();
  SpinIntegrals v = si;
  v.h1s = pt.t;
  SpinIntegrals f = si;
  f.h1s = fock;
  f.eri = Eri(mi.n_spatial);
  CMatrix h = operator_matrix(jw_map(hamiltonian_operator(si), si.n_spin), 8);
  CMatrix sum = operator_matrix(jw_map(hamiltonian_operator(v), 8), 8) + operator_matrix(jw_map(hamiltonian_operator(f), f.n_spin), 8);
  EXPECT_LE((h - sum).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(BuildPerturbation, ZerothOrderIsOccupiedSum) {
  MolecularIntegrals mi = fixture_at("h2", 1.4);
  SpinIntegrals si = spin_orbitalize(mi);
  Eigen::VectorXd eps = orbital_energies(si, 2);
  SpinIntegrals f = si;
  f.h1s = eps.asDiagonal();
  f.eri = Eri(2);
  CMatrix fm = operator_matrix(jw_map(hamiltonian_operator(f), f.n_spin), 4);
  EXPECT_NEAR(fm(0b0011, 0b0011).real(), eps(0) + eps(1), 1e-14);
}

TEST(BuildPerturbation, RejectsNonAntisymmetricTheta) {
  MolecularIntegrals mi = fixture_at("h2", 1.4);
  SpinIntegrals si = spin_orbitalize(mi);
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(4, 4);
  theta(0, 2) = 0.1;
  EXPECT_THROW(build_perturbation(si, orbital_energies(si, 2), theta), Error);
}

}  // namespace
}  // namespace nomp2
