// Copyright 2026 The Fedsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FEDSIM_COMMON_ERROR_H_
#define FEDSIM_COMMON_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace fedsim {

// Broad failure categories. The CLI maps these onto process exit codes.
enum class ErrorCode {
  kInvalidArgument,
  kShapeMismatch,
  kConfig,
  kData,
  kNumerical,
};

std::string_view ErrorCodeName(ErrorCode code);

// Exit code used by the command-line tool for a given category:
// 2 config, 3 data, 4 numerical failure, 1 anything else.
int ExitCodeFor(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string& message);

}  // namespace fedsim

#endif  // FEDSIM_COMMON_ERROR_H_
