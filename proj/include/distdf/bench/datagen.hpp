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

#include "distdf/core/table.hpp"

namespace distdf::bench {

// Counter-based generator (splittable by rank) so any implementation can
// reproduce identical data from a seed; the exact mixing recipe is pinned in
// docs/data_generation.md.
uint64_t mix64(uint64_t z);
uint64_t stream_key(uint64_t seed, uint64_t rank, uint64_t column);
uint64_t draw(uint64_t stream, uint64_t index);

// Two int64 columns, fully valid: "key" drawn uniformly from a domain of
// ceil(total_rows * unique_fraction) values shared by all workers, and a
// uniform "payload". total_rows == 0 means this call's rows are the whole
// relation.
Result<Table> gen_table(int64_t rows, double unique_fraction, uint64_t seed, int worker_rank,
                        int64_t total_rows = 0);

}  // namespace distdf::bench
