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

#include <optional>
#include <string>
#include <utility>

namespace distdf {

enum class Code : int {
  kOk = 0,
  kInvalidArgument = 1,
  kCorruptPayload = 2,
  kProtocolViolation = 3,
  kConnectionError = 4,
  kBootstrapTimeout = 5,
  kTooManyWorkers = 6,
  kChannelBroken = 7,
  kIoError = 8,
  kInternalError = 9,
  kVerificationFailed = 10,
};

const char *code_name(Code code);

class Status {
 public:
  Status() : code_(Code::kOk) {}
  Status(Code code, std::string msg) : code_(code), msg_(std::move(msg)) {}

  static Status OK() { return Status(); }

  bool ok() const { return code_ == Code::kOk; }
  Code code() const { return code_; }
  const std::string &message() const { return msg_; }

  std::string to_string() const;

 private:
  Code code_;
  std::string msg_;
};

template <typename T>
class Result {
 public:
  Result(T value) : value_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  Result(Status status) : status_(std::move(status)) {}  // NOLINT(google-explicit-constructor)

  bool ok() const { return status_.ok(); }
  const Status &status() const { return status_; }

  T &value() { return *value_; }
  const T &value() const { return *value_; }
  T take() { return std::move(*value_); }

 private:
  Status status_;
  std::optional<T> value_;
};

}  // namespace distdf

#define DISTDF_RETURN_NOT_OK(expr)          \
  do {                                      \
    auto _st = (expr);                      \
    if (!_st.ok()) return _st;              \
  } while (0)

#define DISTDF_INTERNAL_CONCAT_(x, y) x##y
#define DISTDF_INTERNAL_CONCAT(x, y) DISTDF_INTERNAL_CONCAT_(x, y)

// Evaluates a Result-returning expression; on error returns its Status,
// otherwise moves the value into lhs.
#define DISTDF_ASSIGN_OR_RAISE(lhs, rexpr)                            \
  auto DISTDF_INTERNAL_CONCAT(_res_, __LINE__) = (rexpr);             \
  if (!DISTDF_INTERNAL_CONCAT(_res_, __LINE__).ok())                  \
    return DISTDF_INTERNAL_CONCAT(_res_, __LINE__).status();          \
  lhs = DISTDF_INTERNAL_CONCAT(_res_, __LINE__).take();
