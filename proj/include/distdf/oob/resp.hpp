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

#include <atomic>
#include <memory>
#include <thread>
#include <vector>

#include "distdf/oob/kv_store.hpp"

namespace distdf::oob {

// TCP client speaking the RESP subset {SET, GET, INCR, RPUSH, BLPOP, DEL}, so
// a stock external key-value server can serve as the rendezvous store. One
// connection per worker.
class RespClient : public KVStoreClient {
 public:
  static Result<std::unique_ptr<RespClient>> Connect(const std::string &addr,
                                                     std::chrono::milliseconds timeout);
  ~RespClient() override;

  RespClient(const RespClient &) = delete;
  RespClient &operator=(const RespClient &) = delete;

  Result<int64_t> incr(const std::string &key) override;
  Status set(const std::string &key, const Bytes &value) override;
  Result<std::optional<Bytes>> get(const std::string &key) override;
  Status rpush(const std::string &key, const Bytes &value) override;
  Result<std::optional<Bytes>> blpop(const std::string &key,
                                     std::chrono::milliseconds timeout) override;
  Status del(const std::string &key) override;

 private:
  explicit RespClient(int fd) : fd_(fd) {}

  struct Reply;
  Status send_command(const std::vector<Bytes> &args);
  Result<Reply> read_reply();
  Result<size_t> fill_buffer();
  Result<std::string> read_line();

  int fd_;
  Bytes buf_;
  size_t buf_pos_ = 0;
};

// Embedded rendezvous server: serves the RESP subset over TCP against an
// InProcKVStore, one thread per connection (BLPOP blocks only that thread).
class RespServer {
 public:
  static Result<std::unique_ptr<RespServer>> Start(uint16_t port = 0);
  ~RespServer();

  RespServer(const RespServer &) = delete;
  RespServer &operator=(const RespServer &) = delete;

  std::string address() const { return "127.0.0.1:" + std::to_string(port_); }
  std::shared_ptr<InProcKVStore> store() { return store_; }
  void stop();

 private:
  RespServer() = default;
  void accept_loop();
  void serve_connection(int fd);

  int listen_fd_ = -1;
  uint16_t port_ = 0;
  std::shared_ptr<InProcKVStore> store_;
  std::thread accept_thread_;
  std::vector<std::thread> conn_threads_;
  std::vector<int> conn_fds_;
  std::mutex conns_mu_;
  std::atomic<bool> stopping_{false};
};

}  // namespace distdf::oob
