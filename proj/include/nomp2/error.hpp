// Copyright 2026 The nisq-omp2 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace nomp2 {

enum class ErrorKind {
  kUsage,
  kParse,
  kHeader,
  kConsistency,
  kInput,
  kCapacity,
  kConvergence,
  kEmptyTable,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; the kind selects the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nomp2
