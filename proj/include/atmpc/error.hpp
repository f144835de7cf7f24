/*
 Copyright 2026 The atmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef ATMPC_ERROR_HPP
#define ATMPC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace atmpc {

enum class ErrorCode {
  DimensionMismatch,
  InvalidArgument,
  NotPositiveDefinite,
  Unbounded,
  SolverFailure,
  EmptyIntersection,
  EmptySet,
  VertexEnumeration,
  RiccatiNonConvergence,
  Uncontrollable,
  QuadraticStability,
  NoCommonLyapunov,
  TerminalSetEmpty,
  UnstableClosedLoop,
  NoPreviousPlan,
  SamplingBudget,
  InfeasibleAtStart,
  Config,
  Io,
};

const char* to_string(ErrorCode code);

/// Exception carrying a machine-readable code; every failure in the
/// library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace atmpc

#endif  // ATMPC_ERROR_HPP
