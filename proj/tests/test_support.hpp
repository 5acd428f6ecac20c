// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "nomp2/oracle.hpp"

namespace nomp2::testing {

inline std::string fixture_dir(const std::string& molecule) {
  return std::string(NOMP2_FIXTURE_DIR) + "/" + molecule;
}

inline ReferenceRecord reference_at(const std::string& molecule, double distance) {
  for (const auto& r : load_reference(reference_path(fixture_dir(molecule))))
    if (std::abs(r.distance_bohr - distance) < 1e-9) return r;
  throw std::runtime_error("no fixture for " + molecule);
}

inline MolecularIntegrals fixture_at(const std::string& molecule, double distance) {
  return load_fixture(reference_at(molecule, distance), fixture_dir(molecule));
}

}  // namespace nomp2::testing
