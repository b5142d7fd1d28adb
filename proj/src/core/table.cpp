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

#include "distdf/core/table.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace distdf {

Result<Table> Table::Make(Schema schema, std::vector<Column> columns) {
  DISTDF_RETURN_NOT_OK(validate_schema(schema));
  if (schema.fields.size() != columns.size()) {
    return Status(Code::kInvalidArgument, "schema/column count mismatch");
  }
  int64_t rows = columns.empty() ? 0 : columns[0].length;
  for (size_t i = 0; i < columns.size(); i++) {
    if (columns[i].dtype != schema.fields[i].dtype) {
      return Status(Code::kInvalidArgument, "column dtype does not match schema");
    }
    if (columns[i].length != rows) {
      return Status(Code::kInvalidArgument, "columns must share the same length");
    }
    DISTDF_RETURN_NOT_OK(validate_column(columns[i]));
  }
  Table t;
  t.schema = std::move(schema);
  t.columns = std::move(columns);
  return t;
}

TableBuilder::TableBuilder(Schema schema) : schema_(std::move(schema)) {
  builders_.reserve(schema_.fields.size());
  for (const auto &f : schema_.fields) builders_.emplace_back(f.dtype);
}

void TableBuilder::append_row(const Table &src, int64_t row) {
  for (size_t c = 0; c < builders_.size(); c++) {
    builders_[c].append_cell(src.columns[c], row);
  }
}

void TableBuilder::append_cells(const Table &src, int64_t row,
                                const std::vector<int64_t> &cols) {
  for (size_t c = 0; c < cols.size(); c++) {
    builders_[c].append_cell(src.columns[static_cast<size_t>(cols[c])], row);
  }
}

Table TableBuilder::finish() {
  Table t;
  t.schema = std::move(schema_);
  t.columns.reserve(builders_.size());
  for (auto &b : builders_) t.columns.push_back(b.finish());
  return t;
}

Result<Table> take(const Table &t, const std::vector<int64_t> &indices) {
  for (int64_t i : indices) {
    if (i < 0 || i >= t.num_rows()) {
      return Status(Code::kInvalidArgument, "take index out of range");
    }
  }
  TableBuilder out(t.schema);
  for (int64_t i : indices) out.append_row(t, i);
  return out.finish();
}

Table empty_like(const Schema &schema) {
  TableBuilder b(schema);
  return b.finish();
}

namespace {

// Total order over doubles: finite/inf values by <, NaN greater than all.
int compare_doubles(double a, double b) {
  bool na = std::isnan(a), nb = std::isnan(b);
  if (na || nb) {
    if (na && nb) return 0;
    return na ? 1 : -1;
  }
  if (a < b) return -1;
  if (a > b) return 1;
  return 0;
}

template <typename T>
int compare_ordered(T a, T b) {
  if (a < b) return -1;
  if (a > b) return 1;
  return 0;
}

}  // namespace

int compare_cell(const Column &a, int64_t ai, const Column &b, int64_t bi) {
  bool av = a.is_valid(ai), bv = b.is_valid(bi);
  if (!av || !bv) {
    if (!av && !bv) return 0;
    return av ? -1 : 1;  // nulls last
  }
  switch (a.dtype) {
    case DataType::kInt64: return compare_ordered(a.int64_at(ai), b.int64_at(bi));
    case DataType::kFloat64: return compare_doubles(a.float64_at(ai), b.float64_at(bi));
    case DataType::kBool: return compare_ordered(a.bool_at(ai) ? 1 : 0, b.bool_at(bi) ? 1 : 0);
    case DataType::kUtf8: {
      auto sa = a.utf8_at(ai), sb = b.utf8_at(bi);
      int c = sa.compare(sb);
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
  }
  return 0;
}

int compare_rows(const Table &a, int64_t ai, const std::vector<int64_t> &a_cols,
                 const Table &b, int64_t bi, const std::vector<int64_t> &b_cols) {
  for (size_t k = 0; k < a_cols.size(); k++) {
    int c = compare_cell(a.columns[static_cast<size_t>(a_cols[k])], ai,
                         b.columns[static_cast<size_t>(b_cols[k])], bi);
    if (c != 0) return c;
  }
  return 0;
}

void append_row_key(const Table &t, int64_t row, const std::vector<int64_t> &cols,
                    std::string *out) {
  for (int64_t ci : cols) {
    const Column &c = t.columns[static_cast<size_t>(ci)];
    if (!c.is_valid(row)) {
      out->push_back('\0');
      continue;
    }
    out->push_back('\x01');
    switch (c.dtype) {
      case DataType::kInt64:
      case DataType::kFloat64:
        out->append(reinterpret_cast<const char *>(c.values.data()) + 8 * row, 8);
        break;
      case DataType::kBool:
        out->push_back(c.bool_at(row) ? '\x01' : '\0');
        break;
      case DataType::kUtf8: {
        auto sv = c.utf8_at(row);
        uint64_t n = sv.size();
        char lenbuf[8];
        for (int i = 0; i < 8; i++) lenbuf[i] = static_cast<char>(n >> (8 * i));
        out->append(lenbuf, 8);
        out->append(sv.data(), sv.size());
        break;
      }
    }
  }
}

std::string row_key(const Table &t, int64_t row, const std::vector<int64_t> &cols) {
  std::string out;
  append_row_key(t, row, cols, &out);
  return out;
}

namespace {

constexpr uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr uint64_t kFnvPrime = 1099511628211ULL;

inline uint64_t fnv1a_byte(uint64_t h, uint8_t b) {
  return (h ^ b) * kFnvPrime;
}

inline uint64_t fnv1a_bytes(uint64_t h, const uint8_t *p, size_t n) {
  for (size_t i = 0; i < n; i++) h = fnv1a_byte(h, p[i]);
  return h;
}

}  // namespace

Result<uint64_t> hash_row(const Table &t, int64_t row, const std::vector<int64_t> &cols,
                          HashMode mode) {
  if (mode == HashMode::kIdentity) {
    uint64_t h = 0;
    for (int64_t ci : cols) {
      const Column &c = t.columns[static_cast<size_t>(ci)];
      if (c.dtype != DataType::kInt64) {
        return Status(Code::kInvalidArgument, "identity hash requires int64 keys");
      }
      h = 31 * h + (c.is_valid(row) ? static_cast<uint64_t>(c.int64_at(row)) : 0);
    }
    return h;
  }
  uint64_t h = kFnvOffset;
  for (int64_t ci : cols) {
    const Column &c = t.columns[static_cast<size_t>(ci)];
    if (!c.is_valid(row)) {
      h = fnv1a_byte(h, 0x00);  // fixed sentinel for null keys
      continue;
    }
    h = fnv1a_byte(h, 0x01);
    switch (c.dtype) {
      case DataType::kInt64:
      case DataType::kFloat64:
        h = fnv1a_bytes(h, c.values.data() + 8 * row, 8);
        break;
      case DataType::kBool:
        h = fnv1a_byte(h, c.bool_at(row) ? 1 : 0);
        break;
      case DataType::kUtf8: {
        auto sv = c.utf8_at(row);
        h = fnv1a_bytes(h, reinterpret_cast<const uint8_t *>(sv.data()), sv.size());
        break;
      }
    }
  }
  return h;
}

Status check_key_cols(const Table &t, const std::vector<int64_t> &cols) {
  if (cols.empty()) return {Code::kInvalidArgument, "key column list is empty"};
  for (int64_t c : cols) {
    if (c < 0 || c >= t.num_cols()) {
      return {Code::kInvalidArgument,
              "key column index " + std::to_string(c) + " out of range"};
    }
  }
  return Status::OK();
}

std::vector<int64_t> all_column_indices(const Table &t) {
  std::vector<int64_t> cols(static_cast<size_t>(t.num_cols()));
  for (size_t i = 0; i < cols.size(); i++) cols[i] = static_cast<int64_t>(i);
  return cols;
}

bool tables_equal_as_multisets(const Table &a, const Table &b) {
  if (a.num_rows() != b.num_rows() || a.num_cols() != b.num_cols()) return false;
  auto cols_a = all_column_indices(a);
  auto cols_b = all_column_indices(b);
  std::vector<std::string> ra, rb;
  ra.reserve(static_cast<size_t>(a.num_rows()));
  rb.reserve(static_cast<size_t>(b.num_rows()));
  for (int64_t i = 0; i < a.num_rows(); i++) ra.push_back(row_key(a, i, cols_a));
  for (int64_t i = 0; i < b.num_rows(); i++) rb.push_back(row_key(b, i, cols_b));
  std::sort(ra.begin(), ra.end());
  std::sort(rb.begin(), rb.end());
  return ra == rb;
}

std::string table_to_string(const Table &t, int64_t max_rows) {
  std::ostringstream os;
  for (int64_t c = 0; c < t.num_cols(); c++) {
    if (c) os << "\t";
    os << t.schema.field(c).name << ":" << dtype_name(t.schema.field(c).dtype);
  }
  os << "\n";
  int64_t n = std::min(t.num_rows(), max_rows);
  for (int64_t r = 0; r < n; r++) {
    for (int64_t c = 0; c < t.num_cols(); c++) {
      if (c) os << "\t";
      os << scalar_to_string(t.columns[static_cast<size_t>(c)].scalar_at(r));
    }
    os << "\n";
  }
  if (n < t.num_rows()) os << "... (" << t.num_rows() << " rows)\n";
  return os.str();
}

}  // namespace distdf
