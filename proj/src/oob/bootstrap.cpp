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

#include "distdf/oob/bootstrap.hpp"

namespace distdf::oob {

namespace {

std::string counter_key(const RendezvousConfig &cfg) { return cfg.job_id + ":rank_counter"; }

std::string ep_key(const RendezvousConfig &cfg, int rank) {
  return cfg.job_id + ":ep:" + std::to_string(rank);
}

std::string sync_key(const RendezvousConfig &cfg, int rank) {
  return cfg.job_id + ":sync:" + std::to_string(rank);
}

std::string ag_data_key(const RendezvousConfig &cfg, uint64_t op_id, int rank) {
  return cfg.job_id + ":ag:" + std::to_string(op_id) + ":data:" + std::to_string(rank);
}

std::string ag_sync_key(const RendezvousConfig &cfg, uint64_t op_id, int rank) {
  return cfg.job_id + ":ag:" + std::to_string(op_id) + ":sync:" + std::to_string(rank);
}

// The shared sync-then-get pattern beneath endpoint exchange and allgather:
// publish own value, push world_size tokens, and for every other rank pop one
// token from its sync list before reading its value. A worker skips its own
// sync list and fills its own slot locally.
Result<std::vector<Bytes>> sync_and_collect(KVStoreClient &kv, const RendezvousConfig &cfg,
                                            int rank, const Bytes &local,
                                            const std::string &data_prefix_kind, uint64_t op_id) {
  auto data_key = [&](int q) {
    return data_prefix_kind == "ep" ? ep_key(cfg, q) : ag_data_key(cfg, op_id, q);
  };
  auto list_key = [&](int q) {
    return data_prefix_kind == "ep" ? sync_key(cfg, q) : ag_sync_key(cfg, op_id, q);
  };

  DISTDF_RETURN_NOT_OK(kv.set(data_key(rank), local));
  std::vector<Bytes> out(static_cast<size_t>(cfg.world_size));
  out[static_cast<size_t>(rank)] = local;
  if (cfg.world_size == 1) return out;

  Bytes token{1};
  for (int i = 0; i < cfg.world_size; i++) {
    DISTDF_RETURN_NOT_OK(kv.rpush(list_key(rank), token));
  }
  for (int q = 0; q < cfg.world_size; q++) {
    if (q == rank) continue;
    DISTDF_ASSIGN_OR_RAISE(auto popped, kv.blpop(list_key(q), cfg.timeout));
    if (!popped.has_value()) {
      return Status(Code::kBootstrapTimeout,
                    "peer " + std::to_string(q) + " never arrived within " +
                        std::to_string(cfg.timeout.count()) + " ms");
    }
    DISTDF_ASSIGN_OR_RAISE(auto value, kv.get(data_key(q)));
    if (!value.has_value()) {
      return Status(Code::kProtocolViolation,
                    "endpoint read after blpop found no value for rank " + std::to_string(q));
    }
    out[static_cast<size_t>(q)] = std::move(*value);
  }
  return out;
}

}  // namespace

Result<int> acquire_rank(KVStoreClient &kv, const RendezvousConfig &cfg) {
  if (cfg.world_size < 1) return Status(Code::kInvalidArgument, "world_size must be >= 1");
  DISTDF_ASSIGN_OR_RAISE(int64_t after, kv.incr(counter_key(cfg)));
  int rank = static_cast<int>(after - 1);  // value before the increment
  if (rank >= cfg.world_size) {
    return Status(Code::kTooManyWorkers,
                  "worker " + std::to_string(rank + 1) + " joined a world of " +
                      std::to_string(cfg.world_size));
  }
  return rank;
}

Result<std::vector<Bytes>> exchange_endpoints(KVStoreClient &kv, const RendezvousConfig &cfg,
                                              int rank, const Bytes &my_addr) {
  if (my_addr.empty()) return Status(Code::kInvalidArgument, "endpoint address is empty");
  if (rank < 0 || rank >= cfg.world_size) {
    return Status(Code::kInvalidArgument, "rank out of range");
  }
  return sync_and_collect(kv, cfg, rank, my_addr, "ep", 0);
}

Result<Bytes> kv_allgather(KVStoreClient &kv, const RendezvousConfig &cfg, int rank,
                           uint64_t op_id, const Bytes &local, size_t item_size) {
  if (local.size() != item_size) {
    return Status(Code::kInvalidArgument, "local contribution does not match item_size");
  }
  if (rank < 0 || rank >= cfg.world_size) {
    return Status(Code::kInvalidArgument, "rank out of range");
  }
  DISTDF_ASSIGN_OR_RAISE(auto parts, sync_and_collect(kv, cfg, rank, local, "ag", op_id));
  Bytes out;
  out.reserve(static_cast<size_t>(cfg.world_size) * item_size);
  for (int q = 0; q < cfg.world_size; q++) {
    const Bytes &part = parts[static_cast<size_t>(q)];
    if (part.size() != item_size) {
      return Status(Code::kProtocolViolation,
                    "rank " + std::to_string(q) + " contributed " + std::to_string(part.size()) +
                        " bytes, expected " + std::to_string(item_size));
    }
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

Status teardown_job(KVStoreClient &kv, const RendezvousConfig &cfg, uint64_t max_op_id) {
  DISTDF_RETURN_NOT_OK(kv.del(counter_key(cfg)));
  for (int q = 0; q < cfg.world_size; q++) {
    DISTDF_RETURN_NOT_OK(kv.del(ep_key(cfg, q)));
    DISTDF_RETURN_NOT_OK(kv.del(sync_key(cfg, q)));
    for (uint64_t op = 0; op < max_op_id; op++) {
      DISTDF_RETURN_NOT_OK(kv.del(ag_data_key(cfg, op, q)));
      DISTDF_RETURN_NOT_OK(kv.del(ag_sync_key(cfg, op, q)));
    }
  }
  return Status::OK();
}

}  // namespace distdf::oob
