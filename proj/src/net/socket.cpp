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

#include "distdf/net/socket.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace distdf::net {

namespace {

Status errno_status(Code code, const std::string &what) {
  return {code, what + ": " + std::strerror(errno)};
}

}  // namespace

Result<HostPort> parse_host_port(const std::string &addr) {
  auto colon = addr.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 >= addr.size()) {
    return Status(Code::kInvalidArgument, "address must be host:port, got '" + addr + "'");
  }
  HostPort hp;
  hp.host = addr.substr(0, colon);
  int port = 0;
  for (size_t i = colon + 1; i < addr.size(); i++) {
    if (addr[i] < '0' || addr[i] > '9') {
      return Status(Code::kInvalidArgument, "bad port in '" + addr + "'");
    }
    port = port * 10 + (addr[i] - '0');
    if (port > 65535) return Status(Code::kInvalidArgument, "port out of range");
  }
  hp.port = static_cast<uint16_t>(port);
  return hp;
}

Result<int> tcp_listen(uint16_t port, uint16_t *bound_port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) return errno_status(Code::kConnectionError, "socket");
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  sa.sin_port = htons(port);
  if (::bind(fd, reinterpret_cast<sockaddr *>(&sa), sizeof(sa)) != 0) {
    close_fd(fd);
    return errno_status(Code::kConnectionError, "bind");
  }
  if (::listen(fd, 128) != 0) {
    close_fd(fd);
    return errno_status(Code::kConnectionError, "listen");
  }
  if (bound_port != nullptr) {
    socklen_t len = sizeof(sa);
    if (::getsockname(fd, reinterpret_cast<sockaddr *>(&sa), &len) != 0) {
      close_fd(fd);
      return errno_status(Code::kConnectionError, "getsockname");
    }
    *bound_port = ntohs(sa.sin_port);
  }
  return fd;
}

Result<int> tcp_accept(int listen_fd, std::chrono::milliseconds timeout) {
  pollfd pfd{listen_fd, POLLIN, 0};
  int rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  if (rc < 0) return errno_status(Code::kConnectionError, "poll");
  if (rc == 0) return Status(Code::kConnectionError, "accept timed out");
  int fd = ::accept(listen_fd, nullptr, nullptr);
  if (fd < 0) return errno_status(Code::kConnectionError, "accept");
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return fd;
}

Result<int> tcp_connect(const std::string &addr, std::chrono::milliseconds timeout) {
  DISTDF_ASSIGN_OR_RAISE(HostPort hp, parse_host_port(addr));
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(hp.port);
  const char *host = hp.host == "localhost" ? "127.0.0.1" : hp.host.c_str();
  if (::inet_pton(AF_INET, host, &sa.sin_addr) != 1) {
    return Status(Code::kInvalidArgument, "cannot parse host '" + hp.host + "'");
  }
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) return errno_status(Code::kConnectionError, "socket");
  timeval tv{};
  tv.tv_sec = timeout.count() / 1000;
  tv.tv_usec = (timeout.count() % 1000) * 1000;
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
  if (::connect(fd, reinterpret_cast<sockaddr *>(&sa), sizeof(sa)) != 0) {
    close_fd(fd);
    return errno_status(Code::kConnectionError, "connect to " + addr);
  }
  timeval zero{};
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &zero, sizeof(zero));
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return fd;
}

Status write_exact(int fd, const void *data, size_t n) {
  const char *p = static_cast<const char *>(data);
  while (n > 0) {
    ssize_t w = ::send(fd, p, n, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      return errno_status(Code::kChannelBroken, "send");
    }
    p += w;
    n -= static_cast<size_t>(w);
  }
  return Status::OK();
}

Result<size_t> read_some(int fd, void *buf, size_t n) {
  while (true) {
    ssize_t r = ::recv(fd, buf, n, 0);
    if (r < 0) {
      if (errno == EINTR) continue;
      return errno_status(Code::kChannelBroken, "recv");
    }
    return static_cast<size_t>(r);
  }
}

Status read_exact(int fd, void *buf, size_t n) {
  char *p = static_cast<char *>(buf);
  while (n > 0) {
    DISTDF_ASSIGN_OR_RAISE(size_t r, read_some(fd, p, n));
    if (r == 0) return Status(Code::kChannelBroken, "peer closed mid-message");
    p += r;
    n -= r;
  }
  return Status::OK();
}

void close_fd(int fd) {
  if (fd >= 0) ::close(fd);
}

void shutdown_fd(int fd) {
  if (fd >= 0) ::shutdown(fd, SHUT_RDWR);
}

}  // namespace distdf::net
