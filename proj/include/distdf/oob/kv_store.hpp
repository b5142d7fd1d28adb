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

#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "distdf/core/types.hpp"
#include "distdf/status.hpp"

namespace distdf::oob {

// Rendezvous store operations used by the bootstrap protocol. incr is atomic
// across all clients; rpush/blpop give FIFO list semantics; blpop blocks its
// calling thread until an element exists or the timeout elapses (absent on
// timeout).
class KVStoreClient {
 public:
  virtual ~KVStoreClient() = default;

  virtual Result<int64_t> incr(const std::string &key) = 0;
  virtual Status set(const std::string &key, const Bytes &value) = 0;
  virtual Result<std::optional<Bytes>> get(const std::string &key) = 0;
  virtual Status rpush(const std::string &key, const Bytes &value) = 0;
  virtual Result<std::optional<Bytes>> blpop(const std::string &key,
                                             std::chrono::milliseconds timeout) = 0;
  virtual Status del(const std::string &key) = 0;
};

// Process-local store shared by worker threads; the test double for a real
// rendezvous server and the backing state of the embedded RESP server.
class InProcKVStore {
 public:
  Result<int64_t> incr(const std::string &key);
  Status set(const std::string &key, const Bytes &value);
  Result<std::optional<Bytes>> get(const std::string &key);
  Status rpush(const std::string &key, const Bytes &value);
  Result<std::optional<Bytes>> blpop(const std::string &key, std::chrono::milliseconds timeout);
  Status del(const std::string &key);

  // Wakes all blocked blpop callers; subsequent blocking calls return timeout.
  void shutdown();

  int64_t list_len(const std::string &key);

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, Bytes> values_;
  std::map<std::string, std::deque<Bytes>> lists_;
  bool shutdown_ = false;
};

// KVStoreClient view over a shared InProcKVStore.
class InProcKVClient : public KVStoreClient {
 public:
  explicit InProcKVClient(std::shared_ptr<InProcKVStore> store) : store_(std::move(store)) {}

  Result<int64_t> incr(const std::string &key) override { return store_->incr(key); }
  Status set(const std::string &key, const Bytes &value) override {
    return store_->set(key, value);
  }
  Result<std::optional<Bytes>> get(const std::string &key) override { return store_->get(key); }
  Status rpush(const std::string &key, const Bytes &value) override {
    return store_->rpush(key, value);
  }
  Result<std::optional<Bytes>> blpop(const std::string &key,
                                     std::chrono::milliseconds timeout) override {
    return store_->blpop(key, timeout);
  }
  Status del(const std::string &key) override { return store_->del(key); }

 private:
  std::shared_ptr<InProcKVStore> store_;
};

}  // namespace distdf::oob
