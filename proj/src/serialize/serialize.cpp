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

#include "distdf/serialize/serialize.hpp"

namespace distdf {

SerializedColumn serialize_column(const Column &c) {
  SerializedColumn s;
  s.validity_buf = c.validity;
  if (c.dtype == DataType::kUtf8) {
    s.offsets_buf.resize(c.offsets.size() * 8);
    for (size_t i = 0; i < c.offsets.size(); i++) {
      le_store_u64(s.offsets_buf.data() + 8 * i, static_cast<uint64_t>(c.offsets[i]));
    }
  }
  s.data_buf = c.values;
  return s;
}

SerializedTable serialize_table(const Table &t) {
  SerializedTable s;
  s.schema = t.schema;
  s.num_rows = t.num_rows();
  s.buffers.reserve(static_cast<size_t>(3 * t.num_cols()));
  for (const auto &c : t.columns) {
    SerializedColumn sc = serialize_column(c);
    s.buffers.push_back(std::move(sc.validity_buf));
    s.buffers.push_back(std::move(sc.offsets_buf));
    s.buffers.push_back(std::move(sc.data_buf));
  }
  s.sizes.reserve(s.buffers.size());
  for (const auto &b : s.buffers) s.sizes.push_back(static_cast<int64_t>(b.size()));
  return s;
}

namespace {

Status corrupt(const std::string &what) { return {Code::kCorruptPayload, what}; }

Status check_trailing_bits(const Bytes &bitmap, int64_t bits, const char *what) {
  for (int64_t i = bits; i < static_cast<int64_t>(bitmap.size()) * 8; i++) {
    if (bit_get(bitmap.data(), i)) {
      return corrupt(std::string(what) + " has nonzero bits beyond row count");
    }
  }
  return Status::OK();
}

}  // namespace

Result<Column> deserialize_column(DataType dtype, int64_t num_rows, const Bytes &validity_buf,
                                  const Bytes &offsets_buf, const Bytes &data_buf) {
  if (num_rows < 0) return corrupt("negative row count");
  if (static_cast<int64_t>(validity_buf.size()) != bitmap_bytes(num_rows)) {
    return corrupt("validity buffer size mismatch");
  }
  DISTDF_RETURN_NOT_OK(check_trailing_bits(validity_buf, num_rows, "validity bitmap"));

  Column c;
  c.dtype = dtype;
  c.length = num_rows;
  c.validity = validity_buf;

  switch (dtype) {
    case DataType::kInt64:
    case DataType::kFloat64:
      if (!offsets_buf.empty()) return corrupt("fixed-width column with offsets buffer");
      if (static_cast<int64_t>(data_buf.size()) != 8 * num_rows) {
        return corrupt("data buffer size mismatch for fixed-width column");
      }
      break;
    case DataType::kBool:
      if (!offsets_buf.empty()) return corrupt("bool column with offsets buffer");
      if (static_cast<int64_t>(data_buf.size()) != bitmap_bytes(num_rows)) {
        return corrupt("data buffer size mismatch for bool column");
      }
      DISTDF_RETURN_NOT_OK(check_trailing_bits(data_buf, num_rows, "bool data"));
      break;
    case DataType::kUtf8: {
      if (static_cast<int64_t>(offsets_buf.size()) != 8 * (num_rows + 1)) {
        return corrupt("offsets buffer size mismatch");
      }
      c.offsets.resize(static_cast<size_t>(num_rows + 1));
      for (int64_t i = 0; i <= num_rows; i++) {
        c.offsets[static_cast<size_t>(i)] =
            static_cast<int64_t>(le_get_u64(offsets_buf.data() + 8 * i));
      }
      if (c.offsets[0] != 0) return corrupt("offsets[0] must be zero");
      for (int64_t i = 0; i < num_rows; i++) {
        if (c.offsets[static_cast<size_t>(i + 1)] < c.offsets[static_cast<size_t>(i)]) {
          return corrupt("offsets must be nondecreasing");
        }
      }
      if (c.offsets[static_cast<size_t>(num_rows)] != static_cast<int64_t>(data_buf.size())) {
        return corrupt("terminal offset does not match data size");
      }
      break;
    }
  }
  c.values = data_buf;
  return c;
}

Result<Table> deserialize_table(const SerializedTable &s) {
  const int64_t n_cols = s.schema.num_cols();
  if (static_cast<int64_t>(s.buffers.size()) != 3 * n_cols) {
    return corrupt("buffer count must be 3 x columns");
  }
  if (s.sizes.size() != s.buffers.size()) return corrupt("size array length mismatch");
  for (size_t i = 0; i < s.buffers.size(); i++) {
    if (s.sizes[i] != static_cast<int64_t>(s.buffers[i].size())) {
      return corrupt("size entry disagrees with buffer length");
    }
  }
  if (n_cols == 0 && s.num_rows != 0) {
    return corrupt("zero-column table cannot carry rows");
  }
  std::vector<Column> cols;
  cols.reserve(static_cast<size_t>(n_cols));
  for (int64_t c = 0; c < n_cols; c++) {
    DISTDF_ASSIGN_OR_RAISE(
        Column col, deserialize_column(s.schema.field(c).dtype, s.num_rows,
                                       s.buffers[static_cast<size_t>(3 * c)],
                                       s.buffers[static_cast<size_t>(3 * c + 1)],
                                       s.buffers[static_cast<size_t>(3 * c + 2)]));
    cols.push_back(std::move(col));
  }
  return Table::Make(s.schema, std::move(cols));
}

Bytes encode_schema(const Schema &s) {
  Bytes out;
  le_put_u32(out, static_cast<uint32_t>(s.fields.size()));
  for (const auto &f : s.fields) {
    le_put_u32(out, static_cast<uint32_t>(f.name.size()));
    out.insert(out.end(), f.name.begin(), f.name.end());
    out.push_back(static_cast<uint8_t>(f.dtype));
  }
  return out;
}

Result<Schema> decode_schema(const Bytes &wire) {
  size_t pos = 0;
  auto need = [&](size_t n) { return pos + n <= wire.size(); };
  if (!need(4)) return corrupt("schema wire truncated at column count");
  uint32_t n_cols = le_get_u32(wire.data());
  pos = 4;
  Schema s;
  for (uint32_t i = 0; i < n_cols; i++) {
    if (!need(4)) return corrupt("schema wire truncated at name length");
    uint32_t name_len = le_get_u32(wire.data() + pos);
    pos += 4;
    if (!need(name_len)) return corrupt("schema wire truncated in name");
    std::string name(reinterpret_cast<const char *>(wire.data()) + pos, name_len);
    pos += name_len;
    if (!need(1)) return corrupt("schema wire truncated at dtype tag");
    uint8_t tag = wire[pos++];
    if (tag > static_cast<uint8_t>(DataType::kUtf8)) {
      return corrupt("unknown dtype tag " + std::to_string(tag));
    }
    s.fields.push_back({std::move(name), static_cast<DataType>(tag)});
  }
  if (pos != wire.size()) return corrupt("trailing bytes after schema");
  Status st = validate_schema(s);
  if (!st.ok()) return corrupt(st.message());
  return s;
}

}  // namespace distdf
