// Copyright 2026 The refinpaint Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include "refinpaint/tensor/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>

#include "refinpaint/errors.hpp"

namespace refinpaint::ad {

namespace {

template <typename U>
void put_le(std::string& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
  }
}

class Reader {
 public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

  bool done() const { return pos_ == bytes_.size(); }

  template <typename U>
  U get_le(const char* what) {
    need(sizeof(U), what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return static_cast<U>(v);
  }

  std::string get_bytes(std::size_t n, const char* what) {
    need(n, what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw FormatError(refinpaint::detail::concat_message("checkpoint truncated while reading ", what));
    }
  }

  std::string bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const std::vector<CheckpointRecord>& records) {
  std::string out(kCheckpointMagic, 4);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  for (const auto& r : records) {
    std::size_t count = 1;
    for (auto d : r.dims) count *= d;
    RI_REQUIRE(count == r.values.size(), "checkpoint record ", r.name, " has inconsistent dims");
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(r.name.size()));
    out += r.name;
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(r.dims.size()));
    for (auto d : r.dims) put_le<std::uint64_t>(out, d);
    for (float v : r.values) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot open checkpoint for writing: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw FormatError("failed writing checkpoint: " + path.string());
}

std::vector<CheckpointRecord> read_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open checkpoint: " + path.string());
  Reader in(std::string(std::istreambuf_iterator<char>(f), {}));
  if (in.get_bytes(4, "magic") != std::string(kCheckpointMagic, 4)) {
    throw FormatError("not a checkpoint (bad magic): " + path.string());
  }
  const auto version = in.get_le<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw FormatError(refinpaint::detail::concat_message("checkpoint version ", version,
                                             " is not supported (this build reads version ",
                                             kCheckpointVersion, ")"));
  }
  std::vector<CheckpointRecord> records;
  while (!in.done()) {
    CheckpointRecord r;
    const auto len = in.get_le<std::uint32_t>("name length");
    r.name = in.get_bytes(len, "name");
    const auto rank = in.get_le<std::uint32_t>("rank");
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
      r.dims.push_back(in.get_le<std::uint64_t>("dims"));
      count *= r.dims.back();
    }
    r.values.resize(count);
    for (auto& v : r.values) v = std::bit_cast<float>(in.get_le<std::uint32_t>("values"));
    records.push_back(std::move(r));
  }
  return records;
}

template <typename T>
void save_parameters(const std::filesystem::path& path, const ParameterList<T>& params) {
  std::vector<CheckpointRecord> records;
  records.reserve(params.size());
  for (const auto& p : params) {
    CheckpointRecord r;
    r.name = p.name;
    for (auto d : p.tensor.shape()) r.dims.push_back(d);
    const auto data = p.tensor.data();
    r.values.assign(data.begin(), data.end());
    records.push_back(std::move(r));
  }
  write_checkpoint(path, records);
}

template <typename T>
void load_parameters(const std::filesystem::path& path, ParameterList<T>& params, bool strict) {
  auto records = read_checkpoint(path);
  std::map<std::string, const CheckpointRecord*> by_name;
  for (const auto& r : records) {
    if (!by_name.emplace(r.name, &r).second) {
      throw FormatError("duplicate parameter in checkpoint: " + r.name);
    }
  }
  std::size_t used = 0;
  for (auto& p : params) {
    auto it = by_name.find(p.name);
    if (it == by_name.end()) {
      if (strict) throw FormatError("checkpoint lacks parameter " + p.name);
      continue;
    }
    const auto& r = *it->second;
    std::vector<std::uint64_t> dims(p.tensor.shape().begin(), p.tensor.shape().end());
    if (dims != r.dims) {
      throw FormatError(refinpaint::detail::concat_message("parameter ", p.name, " has shape ",
                                               to_string(p.tensor.shape()),
                                               " but checkpoint stores a different shape"));
    }
    auto dst = p.tensor.mutable_data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<T>(r.values[i]);
    ++used;
  }
  if (strict && used != records.size()) {
    throw FormatError(refinpaint::detail::concat_message("checkpoint holds ", records.size(),
                                             " parameters but the model consumed ", used));
  }
}

template void save_parameters(const std::filesystem::path&, const ParameterList<float>&);
template void save_parameters(const std::filesystem::path&, const ParameterList<double>&);
template void load_parameters(const std::filesystem::path&, ParameterList<float>&, bool);
template void load_parameters(const std::filesystem::path&, ParameterList<double>&, bool);

}  // namespace refinpaint::ad
