/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "distdf/status.hpp"

namespace distdf {

using Bytes = std::vector<uint8_t>;

enum class DataType : uint8_t {
  kInt64 = 0,
  kFloat64 = 1,
  kBool = 2,
  kUtf8 = 3,
};

const char *dtype_name(DataType t);

inline bool is_fixed_width(DataType t) {
  return t == DataType::kInt64 || t == DataType::kFloat64 || t == DataType::kBool;
}

inline bool is_numeric(DataType t) {
  return t == DataType::kInt64 || t == DataType::kFloat64;
}

struct Field {
  std::string name;
  DataType dtype;

  bool operator==(const Field &other) const = default;
};

// Column names are unique and order is significant; one logical distributed
// table carries the identical schema on every worker.
struct Schema {
  std::vector<Field> fields;

  int64_t num_cols() const { return static_cast<int64_t>(fields.size()); }
  const Field &field(int64_t i) const { return fields[static_cast<size_t>(i)]; }

  bool operator==(const Schema &other) const = default;
};

Status validate_schema(const Schema &schema);

struct Scalar {
  DataType dtype = DataType::kInt64;
  bool valid = false;
  // Holds one value of `dtype`; ignored by all consumers when valid == false.
  std::variant<int64_t, double, bool, std::string> value;

  static Scalar Null(DataType t);
  static Scalar Int64(int64_t v);
  static Scalar Float64(double v);
  static Scalar Bool(bool v);
  static Scalar Utf8(std::string v);

  int64_t as_int64() const { return std::get<int64_t>(value); }
  double as_float64() const { return std::get<double>(value); }
  bool as_bool() const { return std::get<bool>(value); }
  const std::string &as_utf8() const { return std::get<std::string>(value); }

  bool operator==(const Scalar &other) const;
};

std::string scalar_to_string(const Scalar &s);

// Little-endian wire encoding helpers. All integers on the wire are LE.
inline void le_put_u32(Bytes &out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 24));
}

inline void le_put_u64(Bytes &out, uint64_t v) {
  for (int i = 0; i < 8; i++) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

inline uint32_t le_get_u32(const uint8_t *p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

inline uint64_t le_get_u64(const uint8_t *p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; i++) v |= static_cast<uint64_t>(p[i]) << (8 * i);
  return v;
}

inline void le_store_u64(uint8_t *p, uint64_t v) {
  for (int i = 0; i < 8; i++) p[i] = static_cast<uint8_t>(v >> (8 * i));
}

// Validity bitmaps are LSB-first within each byte; bits beyond the row count
// stay zero.
inline int64_t bitmap_bytes(int64_t bits) { return (bits + 7) / 8; }

inline bool bit_get(const uint8_t *bitmap, int64_t i) {
  return (bitmap[i >> 3] >> (i & 7)) & 1;
}

inline void bit_set(uint8_t *bitmap, int64_t i, bool v) {
  if (v) {
    bitmap[i >> 3] |= static_cast<uint8_t>(1u << (i & 7));
  } else {
    bitmap[i >> 3] &= static_cast<uint8_t>(~(1u << (i & 7)));
  }
}

}  // namespace distdf
