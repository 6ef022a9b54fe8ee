/* Copyright 2026 The Neural Transducer Authors. All Rights Reserved.

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

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nt/errors.hpp"
#include "nt/param_store.hpp"

namespace nt {
inline namespace NT_ABI {
namespace {

constexpr char kMagic[4] = {'N', 'T', 'C', 'K'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f32(std::string& out, Real v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  Real f32() { return static_cast<Real>(std::bit_cast<float>(u32())); }

  std::string str(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw CheckpointError("checkpoint truncated");
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_checkpoint(const ParamStore& params, const KeyValues& header) {
  std::string out(kMagic, kMagic + 4);
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  const std::string text = header.format();
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  for (const auto& [name, e] : params) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put_u32(out, static_cast<std::uint32_t>(e.value.rank()));
    for (std::size_t d : e.value.dims()) put_u32(out, static_cast<std::uint32_t>(d));
    for (Real v : e.value.span()) put_f32(out, v);
    for (Real v : e.velocity.span()) put_f32(out, v);
  }
  return out;
}

KeyValues decode_checkpoint(const std::string& bytes, ParamStore& params) {
  Reader in(bytes);
  if (in.str(4) != std::string(kMagic, 4)) throw CheckpointError("not a checkpoint (bad magic)");
  const std::uint32_t version = in.u32();
  if (version != kCheckpointVersion) {
    throw CheckpointVersionError("checkpoint format version " + std::to_string(version) +
                                 " (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  const std::uint32_t count = in.u32();
  const std::uint32_t header_len = in.u32();
  KeyValues header = KeyValues::parse(in.str(header_len));

  ParamStore loaded(params.seed());
  if (header.contains("seed")) loaded.set_seed(static_cast<std::uint64_t>(header.get_int("seed")));
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = in.str(in.u32());
    const std::uint32_t rank = in.u32();
    if (rank == 0 || rank > 8) throw CheckpointError("bad rank for '" + name + "'");
    std::vector<std::size_t> dims(rank);
    for (auto& d : dims) d = in.u32();
    ParamEntry& e = loaded.add(name, dims);
    for (Real& v : e.value.span()) v = in.f32();
    for (Real& v : e.velocity.span()) v = in.f32();
  }
  if (!in.done()) throw CheckpointError("trailing bytes after checkpoint entries");
  params = std::move(loaded);
  return header;
}

void save_checkpoint(const std::string& path, const ParamStore& params, const KeyValues& header) {
  const std::string bytes = encode_checkpoint(params, header);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw CheckpointError("cannot write '" + tmp + "'");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw CheckpointError("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

KeyValues load_checkpoint(const std::string& path, ParamStore& params) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("cannot read checkpoint '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return decode_checkpoint(ss.str(), params);
}

}  // namespace NT_ABI
}  // namespace nt
