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

#ifndef FEDSIM_MODEL_PARAM_IO_H_
#define FEDSIM_MODEL_PARAM_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "fedsim/numeric/param_set.h"

namespace fedsim {

// Flat binary ParamSet format, all integers and floats little-endian:
//
//   magic   8 bytes  "FEDSIMPS"
//   version u32      kParamSetFormatVersion
//   count   u32      number of entries
//   per entry:
//     name_len u32, name bytes (UTF-8, no terminator),
//     rows u32, cols u32, rows * cols IEEE-754 binary64 values (row-major)
inline constexpr std::string_view kParamSetMagic = "FEDSIMPS";
inline constexpr std::uint32_t kParamSetFormatVersion = 1;

std::string SerializeParamSet(const ParamSet& params);
// Throws kData on truncated input, bad magic, unknown version or trailing
// bytes.
ParamSet DeserializeParamSet(std::string_view bytes);

void WriteParamSetFile(const ParamSet& params,
                       const std::filesystem::path& path);
ParamSet ReadParamSetFile(const std::filesystem::path& path);

}  // namespace fedsim

#endif  // FEDSIM_MODEL_PARAM_IO_H_
