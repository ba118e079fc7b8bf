// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include "malab/error.hpp"

namespace malab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Metric: return "metric error";
    case ErrorKind::Inversion: return "inversion error";
    case ErrorKind::Dimension: return "dimension mismatch";
    case ErrorKind::Resolution: return "resolution error";
    case ErrorKind::Contract: return "contract error";
    case ErrorKind::Convergence: return "convergence error";
    case ErrorKind::Fit: return "fit error";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Io: return "io error";
  }
  return "error";
}

}  // namespace malab
