// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace malab {

enum class ErrorKind {
  Domain,       // argument outside the operation's domain
  Metric,       // metric not positive definite
  Inversion,    // singular matrix
  Dimension,    // mismatched sizes
  Resolution,   // grid too coarse for the request
  Contract,     // caller-side precondition on data (densities, shifts)
  Convergence,  // iterative solver exhausted its budget
  Fit,          // too few usable rows for a regression
  Config,       // experiment configuration rejected
  Io,           // file read/write failure
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace malab
