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

#include <vector>

#include "distdf/core/table.hpp"

namespace distdf {

// Wire form of one column: exactly three buffers, any of which may be empty.
// Fixed-width dtypes always have an empty offsets buffer.
struct SerializedColumn {
  Bytes validity_buf;
  Bytes offsets_buf;
  Bytes data_buf;
};

// Flattened table: 3 buffers per column in schema order (validity, offsets,
// data), a per-buffer byte-size array, plus the schema and row count needed
// to reverse the flattening.
struct SerializedTable {
  std::vector<Bytes> buffers;
  std::vector<int64_t> sizes;
  Schema schema;
  int64_t num_rows = 0;
};

SerializedColumn serialize_column(const Column &c);
SerializedTable serialize_table(const Table &t);

Result<Column> deserialize_column(DataType dtype, int64_t num_rows, const Bytes &validity_buf,
                                  const Bytes &offsets_buf, const Bytes &data_buf);
Result<Table> deserialize_table(const SerializedTable &s);

// SchemaWire: u32 LE column count, then per column u32 LE name length, name
// bytes, one dtype tag byte. Byte-exact across platforms.
Bytes encode_schema(const Schema &s);
Result<Schema> decode_schema(const Bytes &wire);

}  // namespace distdf
