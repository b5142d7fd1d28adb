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

#include "distdf/bench/datagen.hpp"

#include <cmath>

namespace distdf::bench {

namespace {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr uint64_t kRankSalt = 0xBF58476D1CE4E5B9ULL;
constexpr uint64_t kColumnSalt = 0x94D049BB133111EBULL;
constexpr uint64_t kIndexSalt = 0x2545F4914F6CDD1DULL;

}  // namespace

uint64_t mix64(uint64_t z) {
  z ^= z >> 33;
  z *= 0xFF51AFD7ED558CCDULL;
  z ^= z >> 33;
  z *= 0xC4CEB9FE1A85EC53ULL;
  z ^= z >> 33;
  return z;
}

uint64_t stream_key(uint64_t seed, uint64_t rank, uint64_t column) {
  uint64_t h = mix64(seed + kGolden);
  h = mix64(h ^ ((rank + 1) * kRankSalt));
  return mix64(h ^ ((column + 1) * kColumnSalt));
}

uint64_t draw(uint64_t stream, uint64_t index) {
  return mix64(stream ^ ((index + 1) * kIndexSalt));
}

Result<Table> gen_table(int64_t rows, double unique_fraction, uint64_t seed, int worker_rank,
                        int64_t total_rows) {
  if (rows < 0) return Status(Code::kInvalidArgument, "negative row count");
  if (!(unique_fraction > 0.0) || unique_fraction > 1.0) {
    return Status(Code::kInvalidArgument, "unique_fraction must be in (0, 1]");
  }
  if (total_rows == 0) total_rows = rows;
  const uint64_t domain = static_cast<uint64_t>(std::max<int64_t>(
      1, static_cast<int64_t>(std::ceil(static_cast<double>(total_rows) * unique_fraction))));

  const uint64_t key_stream = stream_key(seed, static_cast<uint64_t>(worker_rank), 0);
  const uint64_t payload_stream = stream_key(seed, static_cast<uint64_t>(worker_rank), 1);
  Int64Builder keys, payload;
  for (int64_t i = 0; i < rows; i++) {
    keys.append(static_cast<int64_t>(draw(key_stream, static_cast<uint64_t>(i)) % domain));
    payload.append(static_cast<int64_t>(draw(payload_stream, static_cast<uint64_t>(i))));
  }
  Table t;
  t.schema.fields = {{"key", DataType::kInt64}, {"payload", DataType::kInt64}};
  t.columns = {keys.finish(), payload.finish()};
  return t;
}

}  // namespace distdf::bench
