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

#include <optional>

#include "distdf/comm/communicator.hpp"
#include "distdf/core/table.hpp"

namespace distdf::net {

enum class CommDataKind { kTable, kColumn, kScalar };
enum class CollectiveKind { kAllGather, kGather, kBcast, kAllReduce, kAllToAll };

// Which collective operators exist per data kind. The typed API below exposes
// exactly these combinations and nothing else; anything outside the matrix is
// rejected at compile time by not existing.
constexpr bool collective_available(CollectiveKind op, CommDataKind kind) {
  switch (op) {
    case CollectiveKind::kAllGather:
    case CollectiveKind::kGather:
      return true;
    case CollectiveKind::kBcast:
      return kind == CommDataKind::kTable;
    case CollectiveKind::kAllReduce:
      return kind != CommDataKind::kTable;
    case CollectiveKind::kAllToAll:
      return kind == CommDataKind::kTable;
  }
  return false;
}

// Table collectives follow the schema-first protocol: the fixed-size meta
// vector (row count and per-buffer byte lengths) travels before the buffers,
// and each of the 3 x n_cols buffers moves through its own collective round.
// Schemas must already agree across members, except for bcast receivers,
// which pass no table and learn the schema from the wire.

Result<std::vector<Table>> allgather_table(Communicator &c, const Table &t);
Result<std::vector<Table>> gather_table(Communicator &c, const Table &t, int root,
                                        GatherMode mode = GatherMode::kDirect);
Result<Table> bcast_table(Communicator &c, const std::optional<Table> &t, int root);
// Sends partition q to rank q and returns the received partitions
// concatenated in rank order.
Result<Table> alltoall_table(Communicator &c, const std::vector<Table> &parts);

Result<std::vector<Column>> allgather_column(Communicator &c, const Column &col);
Result<std::vector<Column>> gather_column(Communicator &c, const Column &col, int root,
                                          GatherMode mode = GatherMode::kDirect);
// Elementwise reduction; null cells are skipped, positions where every member
// is null stay null. Requires equal dtype and length on all members.
Result<Column> allreduce_column(Communicator &c, const Column &col, ReduceOp op);

Result<std::vector<Scalar>> allgather_scalar(Communicator &c, const Scalar &s);
Result<std::vector<Scalar>> gather_scalar(Communicator &c, const Scalar &s, int root,
                                          GatherMode mode = GatherMode::kDirect);
// Invalid scalars are skipped; all-invalid reduces to an invalid Scalar.
Result<Scalar> allreduce_scalar(Communicator &c, const Scalar &s, ReduceOp op);

}  // namespace distdf::net
