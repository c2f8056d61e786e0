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

#include "fedsim/model/param_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fedsim/common/error.h"

namespace fedsim {
namespace {

template <typename T>
void PutLittleEndian(std::string& out, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>(bits & 0xFF));
    bits >>= 8;
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T Get() {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    Need(sizeof(U));
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      bits |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i]))
              << (8 * i);
    }
    pos_ += sizeof(U);
    return std::bit_cast<T>(bits);
  }

  std::string_view Bytes(std::size_t n) {
    Need(n);
    std::string_view out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  bool done() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      Fail(ErrorCode::kData, "parameter file truncated at byte " +
                                 std::to_string(pos_));
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string SerializeParamSet(const ParamSet& params) {
  std::string out(kParamSetMagic);
  PutLittleEndian(out, kParamSetFormatVersion);
  PutLittleEndian(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& entry : params) {
    PutLittleEndian(out, static_cast<std::uint32_t>(entry.name.size()));
    out += entry.name;
    PutLittleEndian(out, static_cast<std::uint32_t>(entry.tensor.rows()));
    PutLittleEndian(out, static_cast<std::uint32_t>(entry.tensor.cols()));
    for (double v : entry.tensor.values()) PutLittleEndian(out, v);
  }
  return out;
}

ParamSet DeserializeParamSet(std::string_view bytes) {
  Reader reader(bytes);
  if (reader.Bytes(kParamSetMagic.size()) != kParamSetMagic) {
    Fail(ErrorCode::kData, "not a parameter file (bad magic)");
  }
  const auto version = reader.Get<std::uint32_t>();
  if (version != kParamSetFormatVersion) {
    Fail(ErrorCode::kData,
         "unsupported parameter file version " + std::to_string(version));
  }
  const auto count = reader.Get<std::uint32_t>();
  ParamSet params;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = reader.Get<std::uint32_t>();
    std::string name(reader.Bytes(name_len));
    if (params.Contains(name)) {
      Fail(ErrorCode::kData, "duplicate entry '" + name + "' in parameter file");
    }
    const auto rows = reader.Get<std::uint32_t>();
    const auto cols = reader.Get<std::uint32_t>();
    if (rows == 0 || cols == 0 || rows > (1u << 30) || cols > (1u << 30)) {
      Fail(ErrorCode::kData, "entry '" + name + "' has invalid shape");
    }
    const std::size_t n = static_cast<std::size_t>(rows) * cols;
    if (n > reader.remaining() / sizeof(double)) {
      Fail(ErrorCode::kData, "parameter file truncated in entry '" + name + "'");
    }
    std::vector<double> values(n);
    for (double& v : values) v = reader.Get<double>();
    params.Add(std::move(name), Tensor2(static_cast<int>(rows),
                                        static_cast<int>(cols),
                                        std::move(values)));
  }
  if (!reader.done()) Fail(ErrorCode::kData, "trailing bytes in parameter file");
  return params;
}

void WriteParamSetFile(const ParamSet& params,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  const std::string bytes = SerializeParamSet(params);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorCode::kData, "cannot write '" + path.string() + "'");
}

ParamSet ReadParamSetFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kData, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return DeserializeParamSet(buffer.str());
}

}  // namespace fedsim
