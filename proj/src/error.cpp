// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#include "nomp2/error.hpp"

namespace nomp2 {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return "usage error";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kHeader: return "header error";
    case ErrorKind::kConsistency: return "consistency error";
    case ErrorKind::kInput: return "invalid input";
    case ErrorKind::kCapacity: return "capacity error";
    case ErrorKind::kConvergence: return "convergence error";
    case ErrorKind::kEmptyTable: return "empty shot table";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace nomp2
