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

// Splits rows by key hash: row r goes to partition hash(r) mod num_partitions.
// Partition assignment is a pure function of the key bytes, so equal keys
// co-locate across workers.
Result<std::vector<Table>> hash_partition(const Table &t, const std::vector<int64_t> &key_cols,
                                          int64_t num_partitions,
                                          HashMode mode = HashMode::kFnv1a);

// Inner equi-join. Output schema is all left columns followed by the right
// side's non-key columns; right-side name collisions get an "_r" suffix.
// Rows with null keys match nothing.
Result<Table> local_join(const Table &l, const Table &r, const std::vector<int64_t> &l_keys,
                         const std::vector<int64_t> &r_keys);

enum class AggOp { kSum, kCount, kMean, kStd, kMin, kMax };

const char *agg_op_name(AggOp op);

struct AggSpec {
  int64_t col;
  AggOp op;
};

// One output row per distinct key tuple, in first-occurrence order. Nulls are
// excluded from aggregates; count counts valid values; std uses ddof.
Result<Table> local_groupby(const Table &t, const std::vector<int64_t> &key_cols,
                            const std::vector<AggSpec> &aggs, int64_t ddof = 1);

// Emits per-group (sum, sumsq, count) triples per aggregate column, named
// <col>_sum / <col>_sumsq / <col>_count after the key columns. Merging
// partials is componentwise addition, so the triples are associative and
// commutative under merge_partials.
Result<Table> combine_partials(const Table &t, const std::vector<int64_t> &key_cols,
                               const std::vector<int64_t> &agg_cols);

// Re-groups a concatenation of partial tables by key, summing every partial
// column componentwise. num_keys leading columns are the group keys.
Result<Table> merge_partials(const Table &partials, int64_t num_keys);

// Derives <col>_mean and <col>_std from each (sum, sumsq, count) triple,
// keeping sum and count. Groups with n == 0 yield null mean; n <= ddof yields
// null std.
Result<Table> finalize_partials(const Table &partials, int64_t num_keys, int64_t ddof = 1);

enum class ReduceKind { kSum, kMin, kMax, kCount };

// Nulls are skipped. Empty or all-null input: min/max give an invalid Scalar,
// sum gives 0 of the column dtype, count gives 0.
Result<Scalar> column_reduce(const Column &c, ReduceKind op);

// Stable sort on the key tuple; nulls order last.
Result<Table> local_sort(const Table &t, const std::vector<int64_t> &key_cols);

// Keeps the first occurrence of each key tuple.
Result<Table> local_unique(const Table &t, const std::vector<int64_t> &key_cols);

enum class SetOpKind { kUnion, kDifference };

// Set semantics over whole rows: union is the distinct rows of the
// concatenation, difference is the distinct rows of l absent from r.
Result<Table> row_set_op(const Table &l, const Table &r, SetOpKind kind);

Result<Table> concat_tables(const std::vector<Table> &tables);

}  // namespace distdf
