// Copyright 2026 The fadkit Authors. All Rights Reserved.
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

// Little-endian encode/decode helpers shared by the binary file formats.

#ifndef FADKIT_SRC_BINARY_IO_HPP_
#define FADKIT_SRC_BINARY_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "fadkit/errors.hpp"

namespace fadkit::detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }
inline void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

inline std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline float get_f32(const unsigned char* p) { return std::bit_cast<float>(get_u32(p)); }
inline double get_f64(const unsigned char* p) { return std::bit_cast<double>(get_u64(p)); }

// Sequential reader over a byte buffer; throws LengthError on overrun.
class ByteReader {
 public:
  ByteReader(const std::string& bytes, std::string source)
      : data_(reinterpret_cast<const unsigned char*>(bytes.data())),
        size_(bytes.size()),
        source_(std::move(source)) {}

  void expect_magic(const char (&magic)[5]) {
    need(4);
    if (std::memcmp(data_ + pos_, magic, 4) != 0) {
      throw FormatError(source_ + ": bad magic (expected " + magic + ")");
    }
    pos_ += 4;
  }
  std::uint32_t u32() { need(4); auto v = get_u32(data_ + pos_); pos_ += 4; return v; }
  std::uint64_t u64() { need(8); auto v = get_u64(data_ + pos_); pos_ += 8; return v; }
  double f64() { need(8); auto v = get_f64(data_ + pos_); pos_ += 8; return v; }
  float f32() { need(4); auto v = get_f32(data_ + pos_); pos_ += 4; return v; }

  std::size_t remaining() const { return size_ - pos_; }
  const std::string& source() const { return source_; }

  void expect_end() const {
    if (pos_ != size_) throw LengthError(source_ + ": trailing bytes after payload");
  }

 private:
  void need(std::size_t n) const {
    if (size_ - pos_ < n) throw LengthError(source_ + ": truncated file");
  }

  const unsigned char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
  std::string source_;
};

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline void write_file_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot open " + path.string() + " for writing");
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw DataError("write failed: " + path.string());
}

}  // namespace fadkit::detail

#endif  // FADKIT_SRC_BINARY_IO_HPP_
