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

#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "distdf/oob/bootstrap.hpp"

namespace distdf::oob {

// Out-of-band context: rank/world-size metadata plus the side-channel
// collectives a communicator needs before its own transport exists. Confined
// to the worker that created it.
class OOBContext {
 public:
  virtual ~OOBContext() = default;

  virtual int world_size() const = 0;
  virtual int rank() const = 0;

  // Rank-ordered concatenation of world_size x item_size bytes, identical on
  // every member for the same op_id.
  virtual Result<Bytes> oob_allgather(uint64_t op_id, const Bytes &local, size_t item_size) = 0;
  virtual Result<std::vector<Bytes>> exchange_endpoints(const Bytes &my_addr) = 0;
  virtual Status teardown() = 0;

  // Per-context collective id counter, starting at 0.
  uint64_t next_op_id() { return next_op_id_++; }
  uint64_t issued_op_ids() const { return next_op_id_; }

 protected:
  uint64_t next_op_id_ = 0;
};

// Shared in-memory exchange behind static contexts: a test-scope stand-in for
// the MPI out-of-band path, usable only by worker threads in one process.
class StaticExchange {
 public:
  explicit StaticExchange(int world_size) : world_size_(world_size) {}

  int world_size() const { return world_size_; }

  Result<std::vector<Bytes>> exchange_endpoints(int rank, const Bytes &my_addr,
                                                std::chrono::milliseconds timeout);
  Result<Bytes> allgather(int rank, uint64_t op_id, const Bytes &local, size_t item_size,
                          std::chrono::milliseconds timeout);

 private:
  struct OpState {
    std::vector<Bytes> slots;
    int arrived = 0;
  };

  int world_size_;
  std::mutex mu_;
  std::condition_variable cv_;
  OpState endpoints_;
  std::map<uint64_t, OpState> ops_;
};

enum class OOBKind { kKVStore, kStatic };

struct OOBParams {
  // kvstore kind
  RendezvousConfig rendezvous;
  std::shared_ptr<KVStoreClient> client;  // optional; dials store_address when absent

  // static kind
  std::shared_ptr<StaticExchange> exchange;
  int static_rank = 0;
  std::chrono::milliseconds timeout = std::chrono::milliseconds(60000);
};

// kvstore contexts acquire their rank from the store on construction; static
// contexts are built directly from (world_size, rank, shared exchange).
Result<std::shared_ptr<OOBContext>> make_oob_context(const std::string &kind,
                                                     const OOBParams &params);
Result<std::shared_ptr<OOBContext>> make_oob_context(OOBKind kind, const OOBParams &params);

}  // namespace distdf::oob
