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

#include "distdf/oob/resp.hpp"

#include <algorithm>
#include <cstdio>

#include "distdf/net/socket.hpp"

namespace distdf::oob {

namespace {

Bytes to_bytes(const std::string &s) { return Bytes(s.begin(), s.end()); }

std::string to_string(const Bytes &b) { return {b.begin(), b.end()}; }

// BLPOP timeout argument in seconds; fractional seconds are accepted by
// servers speaking RESP2 with float timeouts.
std::string seconds_arg(std::chrono::milliseconds t) {
  if (t.count() % 1000 == 0) return std::to_string(t.count() / 1000);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", static_cast<double>(t.count()) / 1000.0);
  return buf;
}

}  // namespace

struct RespClient::Reply {
  enum class Kind { kSimple, kError, kInteger, kBulk, kNil, kArray, kNilArray };
  Kind kind = Kind::kNil;
  std::string text;
  int64_t integer = 0;
  Bytes bulk;
  std::vector<Reply> elements;
};

Result<std::unique_ptr<RespClient>> RespClient::Connect(const std::string &addr,
                                                        std::chrono::milliseconds timeout) {
  DISTDF_ASSIGN_OR_RAISE(int fd, net::tcp_connect(addr, timeout));
  return std::unique_ptr<RespClient>(new RespClient(fd));
}

RespClient::~RespClient() { net::close_fd(fd_); }

Status RespClient::send_command(const std::vector<Bytes> &args) {
  std::string head = "*" + std::to_string(args.size()) + "\r\n";
  Bytes out(head.begin(), head.end());
  for (const auto &a : args) {
    std::string len = "$" + std::to_string(a.size()) + "\r\n";
    out.insert(out.end(), len.begin(), len.end());
    out.insert(out.end(), a.begin(), a.end());
    out.push_back('\r');
    out.push_back('\n');
  }
  Status st = net::write_exact(fd_, out.data(), out.size());
  if (!st.ok()) return {Code::kConnectionError, "store write failed: " + st.message()};
  return Status::OK();
}

Result<size_t> RespClient::fill_buffer() {
  uint8_t tmp[4096];
  auto r = net::read_some(fd_, tmp, sizeof(tmp));
  if (!r.ok()) return Status(Code::kConnectionError, "store read failed: " + r.status().message());
  if (r.value() == 0) return Status(Code::kConnectionError, "store closed the connection");
  buf_.insert(buf_.end(), tmp, tmp + r.value());
  return r.value();
}

Result<std::string> RespClient::read_line() {
  while (true) {
    for (size_t i = buf_pos_; i + 1 < buf_.size(); i++) {
      if (buf_[i] == '\r' && buf_[i + 1] == '\n') {
        std::string line(buf_.begin() + static_cast<long>(buf_pos_),
                         buf_.begin() + static_cast<long>(i));
        buf_pos_ = i + 2;
        if (buf_pos_ == buf_.size()) {
          buf_.clear();
          buf_pos_ = 0;
        }
        return line;
      }
    }
    DISTDF_RETURN_NOT_OK(fill_buffer().status());
  }
}

Result<RespClient::Reply> RespClient::read_reply() {
  DISTDF_ASSIGN_OR_RAISE(std::string line, read_line());
  if (line.empty()) return Status(Code::kProtocolViolation, "empty RESP line");
  Reply r;
  char type = line[0];
  std::string rest = line.substr(1);
  switch (type) {
    case '+':
      r.kind = Reply::Kind::kSimple;
      r.text = rest;
      return r;
    case '-':
      r.kind = Reply::Kind::kError;
      r.text = rest;
      return r;
    case ':':
      r.kind = Reply::Kind::kInteger;
      r.integer = std::stoll(rest);
      return r;
    case '$': {
      int64_t n = std::stoll(rest);
      if (n < 0) {
        r.kind = Reply::Kind::kNil;
        return r;
      }
      while (buf_.size() - buf_pos_ < static_cast<size_t>(n) + 2) {
        DISTDF_RETURN_NOT_OK(fill_buffer().status());
      }
      r.kind = Reply::Kind::kBulk;
      r.bulk.assign(buf_.begin() + static_cast<long>(buf_pos_),
                    buf_.begin() + static_cast<long>(buf_pos_ + static_cast<size_t>(n)));
      buf_pos_ += static_cast<size_t>(n) + 2;  // skip trailing CRLF
      if (buf_pos_ == buf_.size()) {
        buf_.clear();
        buf_pos_ = 0;
      }
      return r;
    }
    case '*': {
      int64_t n = std::stoll(rest);
      if (n < 0) {
        r.kind = Reply::Kind::kNilArray;
        return r;
      }
      r.kind = Reply::Kind::kArray;
      for (int64_t i = 0; i < n; i++) {
        DISTDF_ASSIGN_OR_RAISE(Reply el, read_reply());
        r.elements.push_back(std::move(el));
      }
      return r;
    }
    default:
      return Status(Code::kProtocolViolation, "unexpected RESP type byte");
  }
}

Result<int64_t> RespClient::incr(const std::string &key) {
  DISTDF_RETURN_NOT_OK(send_command({to_bytes("INCR"), to_bytes(key)}));
  DISTDF_ASSIGN_OR_RAISE(Reply r, read_reply());
  if (r.kind == Reply::Kind::kError) return Status(Code::kProtocolViolation, r.text);
  if (r.kind != Reply::Kind::kInteger) {
    return Status(Code::kProtocolViolation, "INCR expected integer reply");
  }
  return r.integer;
}

Status RespClient::set(const std::string &key, const Bytes &value) {
  DISTDF_RETURN_NOT_OK(send_command({to_bytes("SET"), to_bytes(key), value}));
  DISTDF_ASSIGN_OR_RAISE(Reply r, read_reply());
  if (r.kind == Reply::Kind::kError) return {Code::kProtocolViolation, r.text};
  if (r.kind != Reply::Kind::kSimple || r.text != "OK") {
    return {Code::kProtocolViolation, "SET expected +OK"};
  }
  return Status::OK();
}

Result<std::optional<Bytes>> RespClient::get(const std::string &key) {
  DISTDF_RETURN_NOT_OK(send_command({to_bytes("GET"), to_bytes(key)}));
  DISTDF_ASSIGN_OR_RAISE(Reply r, read_reply());
  if (r.kind == Reply::Kind::kError) return Status(Code::kProtocolViolation, r.text);
  if (r.kind == Reply::Kind::kNil) return std::optional<Bytes>{};
  if (r.kind != Reply::Kind::kBulk) {
    return Status(Code::kProtocolViolation, "GET expected bulk reply");
  }
  return std::optional<Bytes>{std::move(r.bulk)};
}

Status RespClient::rpush(const std::string &key, const Bytes &value) {
  DISTDF_RETURN_NOT_OK(send_command({to_bytes("RPUSH"), to_bytes(key), value}));
  DISTDF_ASSIGN_OR_RAISE(Reply r, read_reply());
  if (r.kind == Reply::Kind::kError) return {Code::kProtocolViolation, r.text};
  if (r.kind != Reply::Kind::kInteger) return {Code::kProtocolViolation, "RPUSH expected integer"};
  return Status::OK();
}

Result<std::optional<Bytes>> RespClient::blpop(const std::string &key,
                                               std::chrono::milliseconds timeout) {
  DISTDF_RETURN_NOT_OK(
      send_command({to_bytes("BLPOP"), to_bytes(key), to_bytes(seconds_arg(timeout))}));
  DISTDF_ASSIGN_OR_RAISE(Reply r, read_reply());
  if (r.kind == Reply::Kind::kError) return Status(Code::kProtocolViolation, r.text);
  if (r.kind == Reply::Kind::kNilArray || r.kind == Reply::Kind::kNil) {
    return std::optional<Bytes>{};  // timeout
  }
  if (r.kind != Reply::Kind::kArray || r.elements.size() != 2 ||
      r.elements[1].kind != Reply::Kind::kBulk) {
    return Status(Code::kProtocolViolation, "BLPOP expected [key, value] array");
  }
  return std::optional<Bytes>{std::move(r.elements[1].bulk)};
}

Status RespClient::del(const std::string &key) {
  DISTDF_RETURN_NOT_OK(send_command({to_bytes("DEL"), to_bytes(key)}));
  DISTDF_ASSIGN_OR_RAISE(Reply r, read_reply());
  if (r.kind == Reply::Kind::kError) return {Code::kProtocolViolation, r.text};
  return Status::OK();
}

// ---------------------------------------------------------------------------
// RespServer

Result<std::unique_ptr<RespServer>> RespServer::Start(uint16_t port) {
  auto server = std::unique_ptr<RespServer>(new RespServer());
  DISTDF_ASSIGN_OR_RAISE(server->listen_fd_, net::tcp_listen(port, &server->port_));
  server->store_ = std::make_shared<InProcKVStore>();
  server->accept_thread_ = std::thread([s = server.get()] { s->accept_loop(); });
  return server;
}

RespServer::~RespServer() { stop(); }

void RespServer::stop() {
  if (stopping_.exchange(true)) return;
  net::shutdown_fd(listen_fd_);
  net::close_fd(listen_fd_);
  store_->shutdown();
  {
    std::lock_guard<std::mutex> lock(conns_mu_);
    for (int fd : conn_fds_) net::shutdown_fd(fd);
  }
  if (accept_thread_.joinable()) accept_thread_.join();
  for (auto &t : conn_threads_) {
    if (t.joinable()) t.join();
  }
  {
    std::lock_guard<std::mutex> lock(conns_mu_);
    for (int fd : conn_fds_) net::close_fd(fd);
    conn_fds_.clear();
  }
}

void RespServer::accept_loop() {
  while (!stopping_.load()) {
    auto fd = net::tcp_accept(listen_fd_, std::chrono::milliseconds(200));
    if (!fd.ok()) continue;
    std::lock_guard<std::mutex> lock(conns_mu_);
    if (stopping_.load()) {
      net::close_fd(fd.value());
      return;
    }
    conn_fds_.push_back(fd.value());
    conn_threads_.emplace_back([this, f = fd.value()] { serve_connection(f); });
  }
}

namespace {

// Minimal RESP request parser for the server side.
struct ConnReader {
  int fd;
  Bytes buf;
  size_t pos = 0;

  bool fill() {
    uint8_t tmp[4096];
    auto r = net::read_some(fd, tmp, sizeof(tmp));
    if (!r.ok() || r.value() == 0) return false;
    buf.insert(buf.end(), tmp, tmp + r.value());
    return true;
  }

  bool line(std::string *out) {
    while (true) {
      for (size_t i = pos; i + 1 < buf.size(); i++) {
        if (buf[i] == '\r' && buf[i + 1] == '\n') {
          out->assign(buf.begin() + static_cast<long>(pos), buf.begin() + static_cast<long>(i));
          pos = i + 2;
          compact();
          return true;
        }
      }
      if (!fill()) return false;
    }
  }

  bool exactly(size_t n, Bytes *out) {
    while (buf.size() - pos < n + 2) {
      if (!fill()) return false;
    }
    out->assign(buf.begin() + static_cast<long>(pos), buf.begin() + static_cast<long>(pos + n));
    pos += n + 2;
    compact();
    return true;
  }

  void compact() {
    if (pos == buf.size()) {
      buf.clear();
      pos = 0;
    }
  }

  // Returns false on disconnect or malformed input.
  bool command(std::vector<Bytes> *args) {
    args->clear();
    std::string head;
    if (!line(&head)) return false;
    if (head.empty() || head[0] != '*') return false;
    int64_t n = 0;
    try {
      n = std::stoll(head.substr(1));
    } catch (...) {
      return false;
    }
    if (n < 1 || n > 1024) return false;
    for (int64_t i = 0; i < n; i++) {
      std::string lenline;
      if (!line(&lenline)) return false;
      if (lenline.empty() || lenline[0] != '$') return false;
      int64_t len = 0;
      try {
        len = std::stoll(lenline.substr(1));
      } catch (...) {
        return false;
      }
      if (len < 0 || len > (1 << 26)) return false;
      Bytes arg;
      if (!exactly(static_cast<size_t>(len), &arg)) return false;
      args->push_back(std::move(arg));
    }
    return true;
  }
};

std::string upper(const Bytes &b) {
  std::string s(b.begin(), b.end());
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

void reply_raw(int fd, const std::string &s) { (void)net::write_exact(fd, s.data(), s.size()); }

void reply_bulk(int fd, const Bytes &b) {
  std::string head = "$" + std::to_string(b.size()) + "\r\n";
  Bytes out(head.begin(), head.end());
  out.insert(out.end(), b.begin(), b.end());
  out.push_back('\r');
  out.push_back('\n');
  (void)net::write_exact(fd, out.data(), out.size());
}

}  // namespace

void RespServer::serve_connection(int fd) {
  ConnReader reader{fd, {}, 0};
  std::vector<Bytes> args;
  while (!stopping_.load() && reader.command(&args)) {
    std::string cmd = upper(args[0]);
    if (cmd == "PING") {
      reply_raw(fd, "+PONG\r\n");
    } else if (cmd == "SET" && args.size() == 3) {
      (void)store_->set(to_string(args[1]), args[2]);
      reply_raw(fd, "+OK\r\n");
    } else if (cmd == "GET" && args.size() == 2) {
      auto v = store_->get(to_string(args[1]));
      if (v.ok() && v.value().has_value()) {
        reply_bulk(fd, *v.value());
      } else {
        reply_raw(fd, "$-1\r\n");
      }
    } else if ((cmd == "INCR" && args.size() == 2) || (cmd == "INCRBY" && args.size() == 3)) {
      int64_t by = 1;
      if (cmd == "INCRBY") {
        try {
          by = std::stoll(to_string(args[2]));
        } catch (...) {
          reply_raw(fd, "-ERR value is not an integer\r\n");
          continue;
        }
      }
      int64_t result = 0;
      bool ok = true;
      for (int64_t i = 0; i < by && ok; i++) {
        auto r = store_->incr(to_string(args[1]));
        ok = r.ok();
        if (ok) result = r.value();
      }
      if (ok) {
        reply_raw(fd, ":" + std::to_string(result) + "\r\n");
      } else {
        reply_raw(fd, "-ERR value is not an integer\r\n");
      }
    } else if (cmd == "RPUSH" && args.size() >= 3) {
      for (size_t i = 2; i < args.size(); i++) {
        (void)store_->rpush(to_string(args[1]), args[i]);
      }
      reply_raw(fd, ":" + std::to_string(store_->list_len(to_string(args[1]))) + "\r\n");
    } else if (cmd == "BLPOP" && args.size() == 3) {
      double seconds = 0;
      try {
        seconds = std::stod(to_string(args[2]));
      } catch (...) {
        reply_raw(fd, "-ERR timeout is not a number\r\n");
        continue;
      }
      auto v = store_->blpop(to_string(args[1]),
                             std::chrono::milliseconds(static_cast<int64_t>(seconds * 1000)));
      if (v.ok() && v.value().has_value()) {
        std::string head = "*2\r\n";
        reply_raw(fd, head);
        reply_bulk(fd, args[1]);
        reply_bulk(fd, *v.value());
      } else {
        reply_raw(fd, "*-1\r\n");
      }
    } else if (cmd == "DEL" && args.size() >= 2) {
      for (size_t i = 1; i < args.size(); i++) (void)store_->del(to_string(args[i]));
      reply_raw(fd, ":" + std::to_string(args.size() - 1) + "\r\n");
    } else {
      reply_raw(fd, "-ERR unknown command '" + cmd + "'\r\n");
    }
  }
  net::shutdown_fd(fd);
}

}  // namespace distdf::oob
