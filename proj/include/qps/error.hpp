/* Copyright 2026 The QPS Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef QPS_ERROR_HPP_
#define QPS_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace qps {

enum class Errc {
  NonHermitianInput,
  ConvergenceFailure,
  NotPsd,
  DimensionMismatch,
  InvalidState,
  DomainEdge,
  IndexOutOfRange,
  NotQuasiPure,
  InvalidPovm,
  BadDecomposition,
  NeedTwoParams,
  ZeroProbability,
  LambdaOutOfRange,
  NotAProjector,
  IncompletePovm,
  NotUnitary,
  ZeroSuccessProbability,
  NonPositiveInput,
  TruncationInsufficient,
  DimensionTooSmall,
  InvalidConfig,
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::NonHermitianInput: return "NonHermitianInput";
    case Errc::ConvergenceFailure: return "ConvergenceFailure";
    case Errc::NotPsd: return "NotPsd";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidState: return "InvalidState";
    case Errc::DomainEdge: return "DomainEdge";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::NotQuasiPure: return "NotQuasiPure";
    case Errc::InvalidPovm: return "InvalidPovm";
    case Errc::BadDecomposition: return "BadDecomposition";
    case Errc::NeedTwoParams: return "NeedTwoParams";
    case Errc::ZeroProbability: return "ZeroProbability";
    case Errc::LambdaOutOfRange: return "LambdaOutOfRange";
    case Errc::NotAProjector: return "NotAProjector";
    case Errc::IncompletePovm: return "IncompletePovm";
    case Errc::NotUnitary: return "NotUnitary";
    case Errc::ZeroSuccessProbability: return "ZeroSuccessProbability";
    case Errc::NonPositiveInput: return "NonPositiveInput";
    case Errc::TruncationInsufficient: return "TruncationInsufficient";
    case Errc::DimensionTooSmall: return "DimensionTooSmall";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

/// Exception carrying one of the library's error kinds. what() is prefixed
/// with the kind name, e.g. "LambdaOutOfRange: lambda must lie in (0, 1)".
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace qps

#endif  // QPS_ERROR_HPP_
