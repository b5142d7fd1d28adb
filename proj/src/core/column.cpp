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

#include "distdf/core/column.hpp"

namespace distdf {

namespace {

Bytes pack_bitmap(const std::vector<bool> &bits) {
  Bytes out(static_cast<size_t>(bitmap_bytes(static_cast<int64_t>(bits.size()))), 0);
  for (size_t i = 0; i < bits.size(); i++) {
    if (bits[i]) bit_set(out.data(), static_cast<int64_t>(i), true);
  }
  return out;
}

}  // namespace

int64_t Column::null_count() const {
  int64_t n = 0;
  for (int64_t i = 0; i < length; i++) {
    if (!is_valid(i)) n++;
  }
  return n;
}

Scalar Column::scalar_at(int64_t i) const {
  if (!is_valid(i)) return Scalar::Null(dtype);
  switch (dtype) {
    case DataType::kInt64: return Scalar::Int64(int64_at(i));
    case DataType::kFloat64: return Scalar::Float64(float64_at(i));
    case DataType::kBool: return Scalar::Bool(bool_at(i));
    case DataType::kUtf8: return Scalar::Utf8(std::string(utf8_at(i)));
  }
  return Scalar::Null(dtype);
}

Status validate_column(const Column &c) {
  if (static_cast<int64_t>(c.validity.size()) != bitmap_bytes(c.length)) {
    return {Code::kInvalidArgument, "validity bitmap size mismatch"};
  }
  for (int64_t i = c.length; i < static_cast<int64_t>(c.validity.size()) * 8; i++) {
    if (bit_get(c.validity.data(), i)) {
      return {Code::kInvalidArgument, "validity bits beyond length must be zero"};
    }
  }
  switch (c.dtype) {
    case DataType::kInt64:
    case DataType::kFloat64:
      if (!c.offsets.empty()) return {Code::kInvalidArgument, "fixed-width column with offsets"};
      if (static_cast<int64_t>(c.values.size()) != 8 * c.length) {
        return {Code::kInvalidArgument, "value buffer size mismatch"};
      }
      break;
    case DataType::kBool:
      if (!c.offsets.empty()) return {Code::kInvalidArgument, "bool column with offsets"};
      if (static_cast<int64_t>(c.values.size()) != bitmap_bytes(c.length)) {
        return {Code::kInvalidArgument, "bool value buffer size mismatch"};
      }
      break;
    case DataType::kUtf8:
      if (static_cast<int64_t>(c.offsets.size()) != c.length + 1) {
        return {Code::kInvalidArgument, "offsets must have length+1 entries"};
      }
      if (c.offsets[0] != 0) return {Code::kInvalidArgument, "offsets[0] must be 0"};
      for (int64_t i = 0; i < c.length; i++) {
        if (c.offsets[i + 1] < c.offsets[i]) {
          return {Code::kInvalidArgument, "offsets must be nondecreasing"};
        }
      }
      if (c.offsets[c.length] != static_cast<int64_t>(c.values.size())) {
        return {Code::kInvalidArgument, "terminal offset must equal data size"};
      }
      break;
  }
  return Status::OK();
}

void Int64Builder::append(int64_t v) {
  vals_.push_back(v);
  valid_.push_back(true);
}

void Int64Builder::append_null() {
  vals_.push_back(0);
  valid_.push_back(false);
}

Column Int64Builder::finish() {
  Column c;
  c.dtype = DataType::kInt64;
  c.length = static_cast<int64_t>(vals_.size());
  c.validity = pack_bitmap(valid_);
  c.values.resize(vals_.size() * 8);
  for (size_t i = 0; i < vals_.size(); i++) {
    le_store_u64(c.values.data() + 8 * i, static_cast<uint64_t>(vals_[i]));
  }
  return c;
}

void Float64Builder::append(double v) {
  vals_.push_back(v);
  valid_.push_back(true);
}

void Float64Builder::append_null() {
  vals_.push_back(0.0);
  valid_.push_back(false);
}

Column Float64Builder::finish() {
  Column c;
  c.dtype = DataType::kFloat64;
  c.length = static_cast<int64_t>(vals_.size());
  c.validity = pack_bitmap(valid_);
  c.values.resize(vals_.size() * 8);
  for (size_t i = 0; i < vals_.size(); i++) {
    uint64_t bits;
    std::memcpy(&bits, &vals_[i], sizeof(bits));
    le_store_u64(c.values.data() + 8 * i, bits);
  }
  return c;
}

void BoolBuilder::append(bool v) {
  vals_.push_back(v);
  valid_.push_back(true);
}

void BoolBuilder::append_null() {
  vals_.push_back(false);
  valid_.push_back(false);
}

Column BoolBuilder::finish() {
  Column c;
  c.dtype = DataType::kBool;
  c.length = static_cast<int64_t>(vals_.size());
  c.validity = pack_bitmap(valid_);
  c.values = pack_bitmap(vals_);
  return c;
}

void Utf8Builder::append(std::string_view v) {
  vals_.emplace_back(v);
  valid_.push_back(true);
}

void Utf8Builder::append_null() {
  vals_.emplace_back();
  valid_.push_back(false);
}

Column Utf8Builder::finish() {
  Column c;
  c.dtype = DataType::kUtf8;
  c.length = static_cast<int64_t>(vals_.size());
  c.validity = pack_bitmap(valid_);
  c.offsets.resize(vals_.size() + 1);
  c.offsets[0] = 0;
  for (size_t i = 0; i < vals_.size(); i++) {
    c.offsets[i + 1] = c.offsets[i] + static_cast<int64_t>(vals_[i].size());
    c.values.insert(c.values.end(), vals_[i].begin(), vals_[i].end());
  }
  return c;
}

CellBuilder::CellBuilder(DataType dtype) : dtype_(dtype) {}

void CellBuilder::append_cell(const Column &src, int64_t row) {
  if (!src.is_valid(row)) {
    append_null();
    return;
  }
  switch (dtype_) {
    case DataType::kInt64: i64_.append(src.int64_at(row)); break;
    case DataType::kFloat64: f64_.append(src.float64_at(row)); break;
    case DataType::kBool: b_.append(src.bool_at(row)); break;
    case DataType::kUtf8: s_.append(src.utf8_at(row)); break;
  }
}

void CellBuilder::append_scalar(const Scalar &s) {
  if (!s.valid) {
    append_null();
    return;
  }
  switch (dtype_) {
    case DataType::kInt64: i64_.append(s.as_int64()); break;
    case DataType::kFloat64: f64_.append(s.as_float64()); break;
    case DataType::kBool: b_.append(s.as_bool()); break;
    case DataType::kUtf8: s_.append(s.as_utf8()); break;
  }
}

void CellBuilder::append_null() {
  switch (dtype_) {
    case DataType::kInt64: i64_.append_null(); break;
    case DataType::kFloat64: f64_.append_null(); break;
    case DataType::kBool: b_.append_null(); break;
    case DataType::kUtf8: s_.append_null(); break;
  }
}

Column CellBuilder::finish() {
  switch (dtype_) {
    case DataType::kInt64: return i64_.finish();
    case DataType::kFloat64: return f64_.finish();
    case DataType::kBool: return b_.finish();
    case DataType::kUtf8: return s_.finish();
  }
  return {};
}

Column make_int64_column(const std::vector<std::optional<int64_t>> &vals) {
  Int64Builder b;
  for (const auto &v : vals) {
    if (v) b.append(*v); else b.append_null();
  }
  return b.finish();
}

Column make_float64_column(const std::vector<std::optional<double>> &vals) {
  Float64Builder b;
  for (const auto &v : vals) {
    if (v) b.append(*v); else b.append_null();
  }
  return b.finish();
}

Column make_bool_column(const std::vector<std::optional<bool>> &vals) {
  BoolBuilder b;
  for (const auto &v : vals) {
    if (v) b.append(*v); else b.append_null();
  }
  return b.finish();
}

Column make_utf8_column(const std::vector<std::optional<std::string>> &vals) {
  Utf8Builder b;
  for (const auto &v : vals) {
    if (v) b.append(*v); else b.append_null();
  }
  return b.finish();
}

}  // namespace distdf
