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

#include "distdf/comm/transport.hpp"

#include "distdf/net/socket.hpp"

namespace distdf::net {

namespace {

class TcpStream : public Stream {
 public:
  explicit TcpStream(int fd) : fd_(fd) {}
  ~TcpStream() override {
    shutdown_fd(fd_);
    close_fd(fd_);
  }

  Status write_all(const uint8_t *data, size_t n) override {
    return write_exact(fd_, data, n);
  }

  Result<size_t> read_some(uint8_t *buf, size_t n) override {
    return net::read_some(fd_, buf, n);
  }

  // Wakes a blocked reader; the fd stays owned until destruction.
  void close() override { shutdown_fd(fd_); }

 private:
  int fd_;
};

class TcpListener : public Listener {
 public:
  TcpListener(int fd, uint16_t port) : fd_(fd), port_(port) {}
  ~TcpListener() override { close(); }

  std::string address() const override { return "127.0.0.1:" + std::to_string(port_); }

  Result<std::unique_ptr<Stream>> accept(std::chrono::milliseconds timeout) override {
    DISTDF_ASSIGN_OR_RAISE(int fd, tcp_accept(fd_, timeout));
    return std::unique_ptr<Stream>(new TcpStream(fd));
  }

  void close() override {
    if (fd_ >= 0) {
      close_fd(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_;
  uint16_t port_;
};

}  // namespace

Result<std::unique_ptr<Listener>> TcpTransport::listen() {
  uint16_t port = 0;
  DISTDF_ASSIGN_OR_RAISE(int fd, tcp_listen(0, &port));
  return std::unique_ptr<Listener>(new TcpListener(fd, port));
}

Result<std::unique_ptr<Stream>> TcpTransport::connect(const std::string &addr,
                                                      std::chrono::milliseconds timeout) {
  DISTDF_ASSIGN_OR_RAISE(int fd, tcp_connect(addr, timeout));
  return std::unique_ptr<Stream>(new TcpStream(fd));
}

// ---------------------------------------------------------------------------
// In-process transport

namespace {

// Unbounded byte queue; writes never block, reads block until data or close.
struct ByteQueue {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<uint8_t> data;
  bool closed = false;

  Status write(const uint8_t *p, size_t n) {
    {
      std::lock_guard<std::mutex> lock(mu);
      if (closed) return {Code::kChannelBroken, "peer endpoint closed"};
      data.insert(data.end(), p, p + n);
    }
    cv.notify_all();
    return Status::OK();
  }

  Result<size_t> read_some(uint8_t *buf, size_t n) {
    std::unique_lock<std::mutex> lock(mu);
    cv.wait(lock, [&] { return !data.empty() || closed; });
    if (data.empty()) return size_t{0};  // closed and drained
    size_t take_n = std::min(n, data.size());
    for (size_t i = 0; i < take_n; i++) {
      buf[i] = data.front();
      data.pop_front();
    }
    return take_n;
  }

  void close() {
    {
      std::lock_guard<std::mutex> lock(mu);
      closed = true;
    }
    cv.notify_all();
  }
};

class InProcStream : public Stream {
 public:
  InProcStream(std::shared_ptr<ByteQueue> in, std::shared_ptr<ByteQueue> out)
      : in_(std::move(in)), out_(std::move(out)) {}
  ~InProcStream() override { close(); }

  Status write_all(const uint8_t *data, size_t n) override { return out_->write(data, n); }
  Result<size_t> read_some(uint8_t *buf, size_t n) override { return in_->read_some(buf, n); }

  void close() override {
    in_->close();
    out_->close();
  }

 private:
  std::shared_ptr<ByteQueue> in_;
  std::shared_ptr<ByteQueue> out_;
};

struct ListenerState {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::unique_ptr<Stream>> backlog;
  bool open = true;
};

}  // namespace

struct InProcTransport::Registry {
  std::mutex mu;
  std::map<std::string, std::shared_ptr<ListenerState>> listeners;
  int64_t next_id = 0;
  std::atomic<int64_t> pairs{0};
};

namespace {

class InProcListener : public Listener {
 public:
  InProcListener(std::string addr, std::shared_ptr<ListenerState> state)
      : addr_(std::move(addr)), state_(std::move(state)) {}
  ~InProcListener() override { close(); }

  std::string address() const override { return addr_; }

  Result<std::unique_ptr<Stream>> accept(std::chrono::milliseconds timeout) override {
    std::unique_lock<std::mutex> lock(state_->mu);
    auto deadline = std::chrono::steady_clock::now() + timeout;
    while (state_->backlog.empty()) {
      if (!state_->open) return Status(Code::kConnectionError, "listener closed");
      if (state_->cv.wait_until(lock, deadline) == std::cv_status::timeout) {
        return Status(Code::kConnectionError, "accept timed out");
      }
    }
    auto stream = std::move(state_->backlog.front());
    state_->backlog.pop_front();
    return stream;
  }

  void close() override {
    {
      std::lock_guard<std::mutex> lock(state_->mu);
      state_->open = false;
    }
    state_->cv.notify_all();
  }

 private:
  std::string addr_;
  std::shared_ptr<ListenerState> state_;
};

}  // namespace

InProcTransport::InProcTransport() : registry_(std::make_shared<Registry>()) {}

InProcTransport::~InProcTransport() = default;

Result<std::unique_ptr<Listener>> InProcTransport::listen() {
  std::lock_guard<std::mutex> lock(registry_->mu);
  std::string addr = "inproc:" + std::to_string(registry_->next_id++);
  auto state = std::make_shared<ListenerState>();
  registry_->listeners[addr] = state;
  return std::unique_ptr<Listener>(new InProcListener(addr, state));
}

Result<std::unique_ptr<Stream>> InProcTransport::connect(const std::string &addr,
                                                         std::chrono::milliseconds) {
  std::shared_ptr<ListenerState> state;
  {
    std::lock_guard<std::mutex> lock(registry_->mu);
    auto it = registry_->listeners.find(addr);
    if (it == registry_->listeners.end()) {
      return Status(Code::kConnectionError, "no in-process listener at '" + addr + "'");
    }
    state = it->second;
  }
  auto a_to_b = std::make_shared<ByteQueue>();
  auto b_to_a = std::make_shared<ByteQueue>();
  auto server_side = std::make_unique<InProcStream>(a_to_b, b_to_a);
  auto client_side = std::make_unique<InProcStream>(b_to_a, a_to_b);
  {
    std::lock_guard<std::mutex> lock(state->mu);
    if (!state->open) return Status(Code::kConnectionError, "listener closed");
    state->backlog.push_back(std::move(server_side));
  }
  state->cv.notify_all();
  registry_->pairs.fetch_add(1);
  return std::unique_ptr<Stream>(std::move(client_side));
}

int64_t InProcTransport::pairs_created() const { return registry_->pairs.load(); }

}  // namespace distdf::net
