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

#include "distdf/oob/kv_store.hpp"

namespace distdf::oob {

struct RendezvousConfig {
  std::string store_address;
  std::string job_id;  // key namespace; all keys live under "<job_id>:"
  int world_size = 1;
  std::chrono::milliseconds timeout = std::chrono::milliseconds(60000);
};

// Rank assignment by atomic increment: the value before the increment is the
// rank. The (world_size+1)-th caller gets too-many-workers.
Result<int> acquire_rank(KVStoreClient &kv, const RendezvousConfig &cfg);

// Publishes my_addr under "<job>:ep:<rank>", pushes world_size tokens onto
// "<job>:sync:<rank>", then for every other rank pops its sync list before
// reading its endpoint. The blocking pop guarantees a get never observes an
// absent endpoint; no polling. Returns the rank-ordered address list.
Result<std::vector<Bytes>> exchange_endpoints(KVStoreClient &kv, const RendezvousConfig &cfg,
                                              int rank, const Bytes &my_addr);

// Same sync-then-get protocol under "<job>:ag:<op_id>:". Distinct op_ids
// proceed independently, so a member may start op k+1 before all members
// finish op k. All members must pass equal item_size; the result is the
// rank-ordered concatenation, identical on every member.
Result<Bytes> kv_allgather(KVStoreClient &kv, const RendezvousConfig &cfg, int rank,
                           uint64_t op_id, const Bytes &local, size_t item_size);

// Deletes every key the protocol may have written for this job.
Status teardown_job(KVStoreClient &kv, const RendezvousConfig &cfg, uint64_t max_op_id);

}  // namespace distdf::oob
