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

#ifndef PHISHCOST_ERROR_H_
#define PHISHCOST_ERROR_H_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace phishcost {

enum class ErrorCode {
  kLengthMismatch,
  kInadmissibleValue,
  kUnknownFeature,
  kSchemaMismatch,
  kParseError,
  kLabelDomainError,
  kDegenerateData,
  kInsufficientIntersection,
  kEmptyDistribution,
  kAllInfeasible,
  kNoSuccessfulTraces,
  kConfigError,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// The single exception type thrown by the library. `index` carries the
// offending coordinate, row or count where the error kind has one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> index = std::nullopt);

  ErrorCode code() const { return code_; }
  std::optional<std::size_t> index() const { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

}  // namespace phishcost

#endif  // PHISHCOST_ERROR_H_
