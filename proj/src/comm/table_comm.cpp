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

#include "distdf/comm/table_comm.hpp"

#include <cstring>

#include "distdf/core/kernels.hpp"
#include "distdf/serialize/serialize.hpp"

namespace distdf::net {

namespace {

Status schema_violation(int rank, const std::string &what) {
  return {Code::kProtocolViolation, "rank " + std::to_string(rank) + ": " + what};
}

// Meta vector for one serialized table: num_rows then the 3*n buffer sizes.
Bytes encode_meta(const SerializedTable &s) {
  Bytes meta;
  le_put_u64(meta, static_cast<uint64_t>(s.num_rows));
  for (int64_t sz : s.sizes) le_put_u64(meta, static_cast<uint64_t>(sz));
  return meta;
}

Result<Table> rebuild_table(const Schema &schema, int64_t num_rows, std::vector<Bytes> buffers) {
  SerializedTable s;
  s.schema = schema;
  s.num_rows = num_rows;
  s.buffers = std::move(buffers);
  s.sizes.reserve(s.buffers.size());
  for (const auto &b : s.buffers) s.sizes.push_back(static_cast<int64_t>(b.size()));
  return deserialize_table(s);
}

}  // namespace

Result<std::vector<Table>> allgather_table(Communicator &c, const Table &t) {
  SerializedTable s = serialize_table(t);
  const size_t n_bufs = s.buffers.size();
  DISTDF_ASSIGN_OR_RAISE(auto metas, c.allgather_v(encode_meta(s)));
  for (int q = 0; q < c.world_size(); q++) {
    if (metas[static_cast<size_t>(q)].size() != 8 * (1 + n_bufs)) {
      return schema_violation(q, "meta vector length disagrees with the shared schema");
    }
  }
  std::vector<std::vector<Bytes>> per_rank(static_cast<size_t>(c.world_size()));
  for (size_t j = 0; j < n_bufs; j++) {
    DISTDF_ASSIGN_OR_RAISE(auto bufs, c.allgather_v(s.buffers[j]));
    for (int q = 0; q < c.world_size(); q++) {
      uint64_t declared = le_get_u64(metas[static_cast<size_t>(q)].data() + 8 * (1 + j));
      if (bufs[static_cast<size_t>(q)].size() != declared) {
        return schema_violation(q, "buffer size disagrees with its meta vector");
      }
      per_rank[static_cast<size_t>(q)].push_back(std::move(bufs[static_cast<size_t>(q)]));
    }
  }
  std::vector<Table> out;
  out.reserve(static_cast<size_t>(c.world_size()));
  for (int q = 0; q < c.world_size(); q++) {
    int64_t rows = static_cast<int64_t>(le_get_u64(metas[static_cast<size_t>(q)].data()));
    DISTDF_ASSIGN_OR_RAISE(Table back,
                           rebuild_table(t.schema, rows, std::move(per_rank[static_cast<size_t>(q)])));
    out.push_back(std::move(back));
  }
  return out;
}

Result<std::vector<Table>> gather_table(Communicator &c, const Table &t, int root,
                                        GatherMode mode) {
  SerializedTable s = serialize_table(t);
  const size_t n_bufs = s.buffers.size();
  DISTDF_ASSIGN_OR_RAISE(auto metas, c.gather_v(encode_meta(s), root, mode));
  std::vector<std::vector<Bytes>> per_rank(static_cast<size_t>(c.world_size()));
  for (size_t j = 0; j < n_bufs; j++) {
    DISTDF_ASSIGN_OR_RAISE(auto bufs, c.gather_v(s.buffers[j], root, mode));
    if (c.rank() != root) continue;
    for (int q = 0; q < c.world_size(); q++) {
      per_rank[static_cast<size_t>(q)].push_back(std::move(bufs[static_cast<size_t>(q)]));
    }
  }
  if (c.rank() != root) return std::vector<Table>{};
  for (int q = 0; q < c.world_size(); q++) {
    if (metas[static_cast<size_t>(q)].size() != 8 * (1 + n_bufs)) {
      return schema_violation(q, "meta vector length disagrees with the shared schema");
    }
  }
  std::vector<Table> out;
  out.reserve(static_cast<size_t>(c.world_size()));
  for (int q = 0; q < c.world_size(); q++) {
    int64_t rows = static_cast<int64_t>(le_get_u64(metas[static_cast<size_t>(q)].data()));
    DISTDF_ASSIGN_OR_RAISE(Table back,
                           rebuild_table(t.schema, rows, std::move(per_rank[static_cast<size_t>(q)])));
    out.push_back(std::move(back));
  }
  return out;
}

Result<Table> bcast_table(Communicator &c, const std::optional<Table> &t, int root) {
  if (root < 0 || root >= c.world_size()) {
    return Status(Code::kInvalidArgument, "bcast root out of range");
  }
  const bool is_root = c.rank() == root;
  if (is_root && !t.has_value()) {
    return Status(Code::kInvalidArgument, "bcast root must pass a table");
  }
  if (!is_root && t.has_value()) {
    return Status(Code::kInvalidArgument, "bcast receivers pass no table");
  }

  // Schema first, then the meta vector, then each buffer.
  Bytes schema_wire = is_root ? encode_schema(t->schema) : Bytes{};
  DISTDF_ASSIGN_OR_RAISE(schema_wire, c.bcast_bytes(std::move(schema_wire), root));
  Schema schema;
  if (is_root) {
    schema = t->schema;
  } else {
    DISTDF_ASSIGN_OR_RAISE(schema, decode_schema(schema_wire));
  }

  SerializedTable s;
  if (is_root) s = serialize_table(*t);
  Bytes meta = is_root ? encode_meta(s) : Bytes{};
  DISTDF_ASSIGN_OR_RAISE(meta, c.bcast_bytes(std::move(meta), root));
  const size_t n_bufs = static_cast<size_t>(3 * schema.num_cols());
  if (meta.size() != 8 * (1 + n_bufs)) {
    return schema_violation(root, "broadcast meta vector length mismatch");
  }

  std::vector<Bytes> buffers(n_bufs);
  for (size_t j = 0; j < n_bufs; j++) {
    Bytes buf = is_root ? s.buffers[j] : Bytes{};
    DISTDF_ASSIGN_OR_RAISE(buf, c.bcast_bytes(std::move(buf), root));
    if (buf.size() != le_get_u64(meta.data() + 8 * (1 + j))) {
      return schema_violation(root, "broadcast buffer size disagrees with meta");
    }
    buffers[j] = std::move(buf);
  }
  if (is_root) return *t;
  int64_t rows = static_cast<int64_t>(le_get_u64(meta.data()));
  return rebuild_table(schema, rows, std::move(buffers));
}

Result<Table> alltoall_table(Communicator &c, const std::vector<Table> &parts) {
  if (static_cast<int>(parts.size()) != c.world_size()) {
    return Status(Code::kInvalidArgument, "alltoall needs one partition per rank");
  }
  const Schema &schema = parts[0].schema;
  for (const auto &p : parts) {
    if (p.schema != schema) {
      return Status(Code::kInvalidArgument, "alltoall partitions must share one schema");
    }
  }
  const size_t n_bufs = static_cast<size_t>(3 * schema.num_cols());

  // Buffer list per target: one meta buffer (row count) then the column
  // buffers; the channel's size-vector phase carries the byte lengths.
  std::vector<std::vector<Bytes>> out(static_cast<size_t>(c.world_size()));
  for (int q = 0; q < c.world_size(); q++) {
    SerializedTable s = serialize_table(parts[static_cast<size_t>(q)]);
    auto &bufs = out[static_cast<size_t>(q)];
    bufs.reserve(1 + n_bufs);
    Bytes meta;
    le_put_u64(meta, static_cast<uint64_t>(s.num_rows));
    bufs.push_back(std::move(meta));
    for (auto &b : s.buffers) bufs.push_back(std::move(b));
  }

  DISTDF_ASSIGN_OR_RAISE(auto in, c.all_to_all_buffers(out));
  std::vector<Table> received;
  received.reserve(static_cast<size_t>(c.world_size()));
  for (int q = 0; q < c.world_size(); q++) {
    auto &bufs = in[static_cast<size_t>(q)];
    if (bufs.size() != 1 + n_bufs || bufs[0].size() != 8) {
      return schema_violation(q, "partition shape disagrees with the shared schema");
    }
    int64_t rows = static_cast<int64_t>(le_get_u64(bufs[0].data()));
    std::vector<Bytes> column_bufs(bufs.begin() + 1, bufs.end());
    DISTDF_ASSIGN_OR_RAISE(Table part, rebuild_table(schema, rows, std::move(column_bufs)));
    received.push_back(std::move(part));
  }
  return concat_tables(received);
}

// ---------------------------------------------------------------------------
// Column and Scalar wire forms

namespace {

Bytes encode_column_wire(const Column &col) {
  SerializedColumn s = serialize_column(col);
  Bytes out;
  out.push_back(static_cast<uint8_t>(col.dtype));
  le_put_u64(out, static_cast<uint64_t>(col.length));
  le_put_u64(out, s.validity_buf.size());
  le_put_u64(out, s.offsets_buf.size());
  le_put_u64(out, s.data_buf.size());
  out.insert(out.end(), s.validity_buf.begin(), s.validity_buf.end());
  out.insert(out.end(), s.offsets_buf.begin(), s.offsets_buf.end());
  out.insert(out.end(), s.data_buf.begin(), s.data_buf.end());
  return out;
}

Result<Column> decode_column_wire(const Bytes &wire) {
  if (wire.size() < 33) return Status(Code::kCorruptPayload, "column wire truncated");
  auto dtype_tag = wire[0];
  if (dtype_tag > static_cast<uint8_t>(DataType::kUtf8)) {
    return Status(Code::kCorruptPayload, "unknown dtype tag");
  }
  int64_t length = static_cast<int64_t>(le_get_u64(wire.data() + 1));
  size_t vs = le_get_u64(wire.data() + 9);
  size_t os = le_get_u64(wire.data() + 17);
  size_t ds = le_get_u64(wire.data() + 25);
  if (wire.size() != 33 + vs + os + ds) {
    return Status(Code::kCorruptPayload, "column wire size mismatch");
  }
  const uint8_t *p = wire.data() + 33;
  Bytes validity(p, p + vs);
  Bytes offsets(p + vs, p + vs + os);
  Bytes data(p + vs + os, p + vs + os + ds);
  return deserialize_column(static_cast<DataType>(dtype_tag), length, validity, offsets, data);
}

Bytes encode_scalar_wire(const Scalar &s) {
  Bytes out;
  out.push_back(static_cast<uint8_t>(s.dtype));
  out.push_back(s.valid ? 1 : 0);
  Bytes payload;
  if (s.valid) {
    switch (s.dtype) {
      case DataType::kInt64:
        le_put_u64(payload, static_cast<uint64_t>(s.as_int64()));
        break;
      case DataType::kFloat64: {
        uint64_t bits;
        double d = s.as_float64();
        std::memcpy(&bits, &d, 8);
        le_put_u64(payload, bits);
        break;
      }
      case DataType::kBool:
        payload.push_back(s.as_bool() ? 1 : 0);
        break;
      case DataType::kUtf8: {
        const std::string &str = s.as_utf8();
        payload.insert(payload.end(), str.begin(), str.end());
        break;
      }
    }
  }
  le_put_u64(out, payload.size());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Result<Scalar> decode_scalar_wire(const Bytes &wire) {
  if (wire.size() < 10) return Status(Code::kCorruptPayload, "scalar wire truncated");
  auto dtype_tag = wire[0];
  if (dtype_tag > static_cast<uint8_t>(DataType::kUtf8)) {
    return Status(Code::kCorruptPayload, "unknown dtype tag");
  }
  auto dtype = static_cast<DataType>(dtype_tag);
  bool valid = wire[1] != 0;
  uint64_t len = le_get_u64(wire.data() + 2);
  if (wire.size() != 10 + len) return Status(Code::kCorruptPayload, "scalar wire size mismatch");
  if (!valid) return Scalar::Null(dtype);
  const uint8_t *p = wire.data() + 10;
  switch (dtype) {
    case DataType::kInt64:
      if (len != 8) return Status(Code::kCorruptPayload, "bad int64 scalar length");
      return Scalar::Int64(static_cast<int64_t>(le_get_u64(p)));
    case DataType::kFloat64: {
      if (len != 8) return Status(Code::kCorruptPayload, "bad float64 scalar length");
      uint64_t bits = le_get_u64(p);
      double d;
      std::memcpy(&d, &bits, 8);
      return Scalar::Float64(d);
    }
    case DataType::kBool:
      if (len != 1) return Status(Code::kCorruptPayload, "bad bool scalar length");
      return Scalar::Bool(*p != 0);
    case DataType::kUtf8:
      return Scalar::Utf8(std::string(reinterpret_cast<const char *>(p), len));
  }
  return Status(Code::kCorruptPayload, "unknown dtype");
}

Status check_reduce_dtype(DataType dtype, ReduceOp op) {
  if (op == ReduceOp::kLand || op == ReduceOp::kLor) {
    if (dtype != DataType::kBool) {
      return {Code::kInvalidArgument, "logical reduction requires a bool column"};
    }
    return Status::OK();
  }
  if (!is_numeric(dtype)) {
    return {Code::kInvalidArgument, "arithmetic reduction requires a numeric dtype"};
  }
  return Status::OK();
}

Scalar reduce_scalar_pair(const Scalar &a, const Scalar &b, ReduceOp op) {
  if (!a.valid) return b;
  if (!b.valid) return a;
  switch (a.dtype) {
    case DataType::kInt64: {
      int64_t x = a.as_int64(), y = b.as_int64();
      switch (op) {
        case ReduceOp::kSum:
          return Scalar::Int64(
              static_cast<int64_t>(static_cast<uint64_t>(x) + static_cast<uint64_t>(y)));
        case ReduceOp::kMin: return Scalar::Int64(std::min(x, y));
        case ReduceOp::kMax: return Scalar::Int64(std::max(x, y));
        default: break;
      }
      break;
    }
    case DataType::kFloat64: {
      double x = a.as_float64(), y = b.as_float64();
      switch (op) {
        case ReduceOp::kSum: return Scalar::Float64(x + y);
        case ReduceOp::kMin: return Scalar::Float64(std::min(x, y));
        case ReduceOp::kMax: return Scalar::Float64(std::max(x, y));
        default: break;
      }
      break;
    }
    case DataType::kBool: {
      bool x = a.as_bool(), y = b.as_bool();
      if (op == ReduceOp::kLand) return Scalar::Bool(x && y);
      if (op == ReduceOp::kLor) return Scalar::Bool(x || y);
      break;
    }
    case DataType::kUtf8:
      break;
  }
  return Scalar::Null(a.dtype);
}

}  // namespace

Result<std::vector<Column>> allgather_column(Communicator &c, const Column &col) {
  DISTDF_ASSIGN_OR_RAISE(auto wires, c.allgather_v(encode_column_wire(col)));
  std::vector<Column> out;
  out.reserve(wires.size());
  for (auto &w : wires) {
    DISTDF_ASSIGN_OR_RAISE(Column back, decode_column_wire(w));
    out.push_back(std::move(back));
  }
  return out;
}

Result<std::vector<Column>> gather_column(Communicator &c, const Column &col, int root,
                                          GatherMode mode) {
  DISTDF_ASSIGN_OR_RAISE(auto wires, c.gather_v(encode_column_wire(col), root, mode));
  if (c.rank() != root) return std::vector<Column>{};
  std::vector<Column> out;
  out.reserve(wires.size());
  for (auto &w : wires) {
    DISTDF_ASSIGN_OR_RAISE(Column back, decode_column_wire(w));
    out.push_back(std::move(back));
  }
  return out;
}

Result<Column> allreduce_column(Communicator &c, const Column &col, ReduceOp op) {
  DISTDF_RETURN_NOT_OK(check_reduce_dtype(col.dtype, op));
  DISTDF_ASSIGN_OR_RAISE(auto cols, allgather_column(c, col));
  for (int q = 0; q < c.world_size(); q++) {
    const Column &other = cols[static_cast<size_t>(q)];
    if (other.dtype != col.dtype || other.length != col.length) {
      return schema_violation(q, "allreduce column shape mismatch");
    }
  }
  CellBuilder out(col.dtype);
  for (int64_t i = 0; i < col.length; i++) {
    Scalar acc = Scalar::Null(col.dtype);
    for (int q = 0; q < c.world_size(); q++) {
      acc = reduce_scalar_pair(acc, cols[static_cast<size_t>(q)].scalar_at(i), op);
    }
    out.append_scalar(acc);
  }
  return out.finish();
}

Result<std::vector<Scalar>> allgather_scalar(Communicator &c, const Scalar &s) {
  DISTDF_ASSIGN_OR_RAISE(auto wires, c.allgather_v(encode_scalar_wire(s)));
  std::vector<Scalar> out;
  out.reserve(wires.size());
  for (auto &w : wires) {
    DISTDF_ASSIGN_OR_RAISE(Scalar back, decode_scalar_wire(w));
    out.push_back(std::move(back));
  }
  return out;
}

Result<std::vector<Scalar>> gather_scalar(Communicator &c, const Scalar &s, int root,
                                          GatherMode mode) {
  DISTDF_ASSIGN_OR_RAISE(auto wires, c.gather_v(encode_scalar_wire(s), root, mode));
  if (c.rank() != root) return std::vector<Scalar>{};
  std::vector<Scalar> out;
  out.reserve(wires.size());
  for (auto &w : wires) {
    DISTDF_ASSIGN_OR_RAISE(Scalar back, decode_scalar_wire(w));
    out.push_back(std::move(back));
  }
  return out;
}

Result<Scalar> allreduce_scalar(Communicator &c, const Scalar &s, ReduceOp op) {
  DISTDF_RETURN_NOT_OK(check_reduce_dtype(s.dtype, op));
  DISTDF_ASSIGN_OR_RAISE(auto scalars, allgather_scalar(c, s));
  Scalar acc = Scalar::Null(s.dtype);
  for (int q = 0; q < c.world_size(); q++) {
    const Scalar &other = scalars[static_cast<size_t>(q)];
    if (other.dtype != s.dtype) return schema_violation(q, "allreduce scalar dtype mismatch");
    acc = reduce_scalar_pair(acc, other, op);
  }
  return acc;
}

}  // namespace distdf::net
