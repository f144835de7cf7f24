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
#include "atmpc/error.hpp"

namespace atmpc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::VertexEnumeration: return "VertexEnumeration";
    case ErrorCode::RiccatiNonConvergence: return "RiccatiNonConvergence";
    case ErrorCode::Uncontrollable: return "Uncontrollable";
    case ErrorCode::QuadraticStability: return "QuadraticStability";
    case ErrorCode::NoCommonLyapunov: return "NoCommonLyapunov";
    case ErrorCode::TerminalSetEmpty: return "TerminalSetEmpty";
    case ErrorCode::UnstableClosedLoop: return "UnstableClosedLoop";
    case ErrorCode::NoPreviousPlan: return "NoPreviousPlan";
    case ErrorCode::SamplingBudget: return "SamplingBudget";
    case ErrorCode::InfeasibleAtStart: return "InfeasibleAtStart";
    case ErrorCode::Config: return "Config";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace atmpc
