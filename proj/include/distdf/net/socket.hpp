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
#include <cstdint>
#include <string>

#include "distdf/status.hpp"

namespace distdf::net {

// Thin POSIX TCP helpers; all endpoints are UTF-8 "host:port" strings.
struct HostPort {
  std::string host;
  uint16_t port = 0;
};

Result<HostPort> parse_host_port(const std::string &addr);

// Listens on 127.0.0.1 with an ephemeral port when port == 0; returns the fd.
Result<int> tcp_listen(uint16_t port, uint16_t *bound_port);
Result<int> tcp_accept(int listen_fd, std::chrono::milliseconds timeout);
Result<int> tcp_connect(const std::string &addr, std::chrono::milliseconds timeout);

Status write_exact(int fd, const void *data, size_t n);
// Blocking read of at least one byte; returns 0 at EOF.
Result<size_t> read_some(int fd, void *buf, size_t n);
Status read_exact(int fd, void *buf, size_t n);

void close_fd(int fd);
void shutdown_fd(int fd);

}  // namespace distdf::net
