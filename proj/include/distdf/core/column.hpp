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

#include <cstring>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "distdf/core/types.hpp"

namespace distdf {

// In-memory columnar array. Buffers use the wire layout directly: validity is
// an LSB-first bitmap of ceil(length/8) bytes, values hold little-endian
// fixed-width cells (bit-packed for Bool), offsets delimit Utf8 cells with
// length+1 entries. Immutable after construction; build via the builders.
struct Column {
  DataType dtype = DataType::kInt64;
  int64_t length = 0;
  Bytes validity;
  std::vector<int64_t> offsets;  // present iff dtype == kUtf8
  Bytes values;

  bool is_valid(int64_t i) const { return bit_get(validity.data(), i); }
  int64_t null_count() const;

  int64_t int64_at(int64_t i) const {
    return static_cast<int64_t>(le_get_u64(values.data() + 8 * i));
  }
  double float64_at(int64_t i) const {
    uint64_t bits = le_get_u64(values.data() + 8 * i);
    double d;
    std::memcpy(&d, &bits, sizeof(d));
    return d;
  }
  bool bool_at(int64_t i) const { return bit_get(values.data(), i); }
  std::string_view utf8_at(int64_t i) const {
    return {reinterpret_cast<const char *>(values.data()) + offsets[i],
            static_cast<size_t>(offsets[i + 1] - offsets[i])};
  }

  Scalar scalar_at(int64_t i) const;

  bool operator==(const Column &other) const = default;
};

Status validate_column(const Column &c);

class Int64Builder {
 public:
  void append(int64_t v);
  void append_null();
  Column finish();

 private:
  std::vector<int64_t> vals_;
  std::vector<bool> valid_;
};

class Float64Builder {
 public:
  void append(double v);
  void append_null();
  Column finish();

 private:
  std::vector<double> vals_;
  std::vector<bool> valid_;
};

class BoolBuilder {
 public:
  void append(bool v);
  void append_null();
  Column finish();

 private:
  std::vector<bool> vals_;
  std::vector<bool> valid_;
};

class Utf8Builder {
 public:
  void append(std::string_view v);
  void append_null();
  Column finish();

 private:
  std::vector<std::string> vals_;
  std::vector<bool> valid_;
};

// Appends cells of one dtype; used by row-wise table assembly.
class CellBuilder {
 public:
  explicit CellBuilder(DataType dtype);

  void append_cell(const Column &src, int64_t row);
  void append_scalar(const Scalar &s);
  void append_null();
  Column finish();
  DataType dtype() const { return dtype_; }

 private:
  DataType dtype_;
  Int64Builder i64_;
  Float64Builder f64_;
  BoolBuilder b_;
  Utf8Builder s_;
};

Column make_int64_column(const std::vector<std::optional<int64_t>> &vals);
Column make_float64_column(const std::vector<std::optional<double>> &vals);
Column make_bool_column(const std::vector<std::optional<bool>> &vals);
Column make_utf8_column(const std::vector<std::optional<std::string>> &vals);

}  // namespace distdf
