// Copyright 2026 The Concet Authors
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
//
// Binary serialization primitives.  All multi-byte values are written
// little-endian byte by byte, so files are portable across hosts.

#ifndef CONCET_IO_HPP_
#define CONCET_IO_HPP_

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "concet/error.hpp"
#include "concet/tensor.hpp"

namespace concet {
namespace io {

inline void write_u8(std::ostream& os, uint8_t v) {
  os.put(static_cast<char>(v));
}

inline uint8_t read_u8(std::istream& is) {
  int c = is.get();
  if (c == EOF) throw DataError("unexpected end of file");
  return static_cast<uint8_t>(c);
}

inline void write_u32(std::ostream& os, uint32_t v) {
  for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline uint32_t read_u32(std::istream& is) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(read_u8(is)) << (8 * i);
  return v;
}

inline void write_u64(std::ostream& os, uint64_t v) {
  for (int i = 0; i < 8; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline uint64_t read_u64(std::istream& is) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(read_u8(is)) << (8 * i);
  return v;
}

inline void write_f64(std::ostream& os, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  write_u64(os, bits);
}

inline double read_f64(std::istream& is) {
  uint64_t bits = read_u64(is);
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

inline void write_string(std::ostream& os, const std::string& s) {
  write_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& is) {
  uint64_t n = read_u64(is);
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  if (static_cast<uint64_t>(is.gcount()) != n)
    throw DataError("unexpected end of file in string");
  return s;
}

inline void write_f64_vec(std::ostream& os, const std::vector<double>& v) {
  write_u64(os, v.size());
  for (double x : v) write_f64(os, x);
}

inline std::vector<double> read_f64_vec(std::istream& is) {
  uint64_t n = read_u64(is);
  std::vector<double> v(n);
  for (auto& x : v) x = read_f64(is);
  return v;
}

inline void write_tensor(std::ostream& os, const Tensor& t) {
  write_u8(os, static_cast<uint8_t>(t.rank()));
  write_u64(os, t.rows());
  write_u64(os, t.cols());
  for (size_t i = 0; i < t.size(); ++i) write_f64(os, t[i]);
}

inline Tensor read_tensor(std::istream& is) {
  int rank = read_u8(is);
  uint64_t rows = read_u64(is);
  uint64_t cols = read_u64(is);
  Tensor t;
  if (rank == 1) {
    t = Tensor(rows);
  } else if (rank == 2) {
    t = Tensor(rows, cols);
  } else {
    throw DataError("unsupported tensor rank in file");
  }
  for (size_t i = 0; i < t.size(); ++i) t[i] = read_f64(is);
  return t;
}

// Reads a whole file into memory; throws DataError when missing.
std::string read_file(const std::string& path);

// Writes `content` atomically-ish (temp file + rename not needed here; the
// CLI writes outputs once).
void write_file(const std::string& path, const std::string& content);

// Splits a file into lines, dropping a trailing empty line.  Keeps empty
// interior lines so line numbers in errors stay accurate.
std::vector<std::string> read_lines(const std::string& path);

}  // namespace io
}  // namespace concet

#endif  // CONCET_IO_HPP_
