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
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "distdf/core/types.hpp"
#include "distdf/status.hpp"

namespace distdf::net {

// Reliable, ordered, full-duplex byte stream between two workers.
class Stream {
 public:
  virtual ~Stream() = default;
  virtual Status write_all(const uint8_t *data, size_t n) = 0;
  // Blocks for at least one byte; returns 0 once the peer has closed.
  virtual Result<size_t> read_some(uint8_t *buf, size_t n) = 0;
  virtual void close() = 0;
};

class Listener {
 public:
  virtual ~Listener() = default;
  virtual std::string address() const = 0;
  virtual Result<std::unique_ptr<Stream>> accept(std::chrono::milliseconds timeout) = 0;
  virtual void close() = 0;
};

// Endpoint addresses are UTF-8 "host:port" strings. connect() completes once
// the handshake reaches the listener backlog, independent of accept timing.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual Result<std::unique_ptr<Listener>> listen() = 0;
  virtual Result<std::unique_ptr<Stream>> connect(const std::string &addr,
                                                  std::chrono::milliseconds timeout) = 0;
};

class TcpTransport : public Transport {
 public:
  Result<std::unique_ptr<Listener>> listen() override;
  Result<std::unique_ptr<Stream>> connect(const std::string &addr,
                                          std::chrono::milliseconds timeout) override;
};

// In-process transport: paired unbounded byte queues. One instance is the
// boundary between worker threads of a single OS process and is safe to share
// between them.
class InProcTransport : public Transport {
 public:
  InProcTransport();
  ~InProcTransport() override;

  Result<std::unique_ptr<Listener>> listen() override;
  Result<std::unique_ptr<Stream>> connect(const std::string &addr,
                                          std::chrono::milliseconds timeout) override;

  // Total stream pairs ever created; one accepted connection == one pair.
  int64_t pairs_created() const;

 private:
  struct Registry;
  std::shared_ptr<Registry> registry_;
};

}  // namespace distdf::net
