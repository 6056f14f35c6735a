// Copyright 2026 The phishcost Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "phishcost/error.h"

namespace phishcost {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kInadmissibleValue: return "InadmissibleValue";
    case ErrorCode::kUnknownFeature: return "UnknownFeature";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kLabelDomainError: return "LabelDomainError";
    case ErrorCode::kDegenerateData: return "DegenerateData";
    case ErrorCode::kInsufficientIntersection: return "InsufficientIntersection";
    case ErrorCode::kEmptyDistribution: return "EmptyDistribution";
    case ErrorCode::kAllInfeasible: return "AllInfeasible";
    case ErrorCode::kNoSuccessfulTraces: return "NoSuccessfulTraces";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IOError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> index)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code),
      index_(index) {}

}  // namespace phishcost
