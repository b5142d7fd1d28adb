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

#include <string>
#include <vector>

#include "distdf/core/column.hpp"
#include "distdf/core/types.hpp"

namespace distdf {

struct Table {
  Schema schema;
  std::vector<Column> columns;

  int64_t num_rows() const { return columns.empty() ? 0 : columns[0].length; }
  int64_t num_cols() const { return static_cast<int64_t>(columns.size()); }
  const Column &column(int64_t i) const { return columns[static_cast<size_t>(i)]; }

  static Result<Table> Make(Schema schema, std::vector<Column> columns);

  bool operator==(const Table &other) const = default;
};

// Builds a table row-by-row against a fixed schema.
class TableBuilder {
 public:
  explicit TableBuilder(Schema schema);

  void append_row(const Table &src, int64_t row);
  // Appends the row spliced from two source tables (join output assembly).
  void append_cells(const Table &src, int64_t row, const std::vector<int64_t> &cols);
  CellBuilder &cell_builder(int64_t col) { return builders_[static_cast<size_t>(col)]; }
  Table finish();

 private:
  Schema schema_;
  std::vector<CellBuilder> builders_;
};

Result<Table> take(const Table &t, const std::vector<int64_t> &indices);
Table empty_like(const Schema &schema);

// Three-way comparison of one cell; nulls order last, NaN after finite values.
int compare_cell(const Column &a, int64_t ai, const Column &b, int64_t bi);
// Lexicographic comparison over key columns of (possibly different) tables.
int compare_rows(const Table &a, int64_t ai, const std::vector<int64_t> &a_cols,
                 const Table &b, int64_t bi, const std::vector<int64_t> &b_cols);

// Injective byte encoding of the selected cells; equal rows produce equal
// keys and vice versa. Used for hash-map grouping and row-set operations.
std::string row_key(const Table &t, int64_t row, const std::vector<int64_t> &cols);
void append_row_key(const Table &t, int64_t row, const std::vector<int64_t> &cols,
                    std::string *out);

enum class HashMode {
  kFnv1a,     // 64-bit FNV-1a over per-cell [validity byte | LE value bytes]
  kIdentity,  // test mode: h(k) = k for Int64 keys
};

Result<uint64_t> hash_row(const Table &t, int64_t row, const std::vector<int64_t> &cols,
                          HashMode mode);

Status check_key_cols(const Table &t, const std::vector<int64_t> &cols);

std::vector<int64_t> all_column_indices(const Table &t);

// Multiset equality of row contents, ignoring row order and column names.
bool tables_equal_as_multisets(const Table &a, const Table &b);

std::string table_to_string(const Table &t, int64_t max_rows = 20);

}  // namespace distdf
