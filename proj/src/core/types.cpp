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

#include "distdf/core/types.hpp"

#include <unordered_set>

namespace distdf {

const char *dtype_name(DataType t) {
  switch (t) {
    case DataType::kInt64: return "int64";
    case DataType::kFloat64: return "float64";
    case DataType::kBool: return "bool";
    case DataType::kUtf8: return "utf8";
  }
  return "?";
}

Status validate_schema(const Schema &schema) {
  std::unordered_set<std::string> seen;
  for (const auto &f : schema.fields) {
    if (!seen.insert(f.name).second) {
      return {Code::kInvalidArgument, "duplicate column name '" + f.name + "'"};
    }
  }
  return Status::OK();
}

Scalar Scalar::Null(DataType t) {
  Scalar s;
  s.dtype = t;
  s.valid = false;
  switch (t) {
    case DataType::kInt64: s.value = int64_t{0}; break;
    case DataType::kFloat64: s.value = double{0}; break;
    case DataType::kBool: s.value = false; break;
    case DataType::kUtf8: s.value = std::string(); break;
  }
  return s;
}

Scalar Scalar::Int64(int64_t v) {
  Scalar s;
  s.dtype = DataType::kInt64;
  s.valid = true;
  s.value = v;
  return s;
}

Scalar Scalar::Float64(double v) {
  Scalar s;
  s.dtype = DataType::kFloat64;
  s.valid = true;
  s.value = v;
  return s;
}

Scalar Scalar::Bool(bool v) {
  Scalar s;
  s.dtype = DataType::kBool;
  s.valid = true;
  s.value = v;
  return s;
}

Scalar Scalar::Utf8(std::string v) {
  Scalar s;
  s.dtype = DataType::kUtf8;
  s.valid = true;
  s.value = std::move(v);
  return s;
}

bool Scalar::operator==(const Scalar &other) const {
  if (dtype != other.dtype || valid != other.valid) return false;
  if (!valid) return true;
  return value == other.value;
}

std::string scalar_to_string(const Scalar &s) {
  if (!s.valid) return "null";
  switch (s.dtype) {
    case DataType::kInt64: return std::to_string(s.as_int64());
    case DataType::kFloat64: return std::to_string(s.as_float64());
    case DataType::kBool: return s.as_bool() ? "true" : "false";
    case DataType::kUtf8: return "\"" + s.as_utf8() + "\"";
  }
  return "?";
}

}  // namespace distdf
