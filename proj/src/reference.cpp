// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "nomp2/error.hpp"
#include "nomp2/oracle.hpp"

namespace nomp2 {

std::string reference_path(const std::string& dir) { return (std::filesystem::path(dir) / "reference.json").string(); }

std::vector<ReferenceRecord> load_reference(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kInput, "cannot open reference file '" + path + "'");
  std::vector<ReferenceRecord> out;
  try {
    nlohmann::json doc = nlohmann::json::parse(f);
    for (const auto& r : doc.at("records")) {
      ReferenceRecord rec;
      rec.molecule = r.at("molecule").get<std::string>();
      rec.distance_bohr = r.at("distance_bohr").get<double>();
      rec.fcidump = r.at("fcidump").get<std::string>();
      rec.n_electrons = r.at("n_electrons").get<int>();
      rec.active.frozen_occupied = r.value("frozen_occupied", std::vector<int>{});
      rec.active.deleted_virtual = r.value("deleted_virtual", std::vector<int>{});
      rec.e_hf = r.at("e_hf").get<double>();
      rec.e_mp2 = r.at("e_mp2").get<double>();
      rec.e_omp2 = r.at("e_omp2").get<double>();
      rec.e_fci = r.at("e_fci").get<double>();
      rec.orbital_energies = r.at("orbital_energies").get<std::vector<double>>();
      rec.source = r.value("source", "");
      out.push_back(std::move(rec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, path + ": " + e.what());
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ReferenceRecord& a, const ReferenceRecord& b) { return a.distance_bohr < b.distance_bohr; });
  return out;
}

MolecularIntegrals load_fixture(const ReferenceRecord& rec, const std::string& dir) {
  MolecularIntegrals mi = read_fcidump((std::filesystem::path(dir) / rec.fcidump).string());
  return freeze_active_space(mi, rec.active);
}

}  // namespace nomp2
