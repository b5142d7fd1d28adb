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

#include "distdf/status.hpp"

namespace distdf {

const char *code_name(Code code) {
  switch (code) {
    case Code::kOk: return "ok";
    case Code::kInvalidArgument: return "invalid-argument";
    case Code::kCorruptPayload: return "corrupt-payload";
    case Code::kProtocolViolation: return "protocol-violation";
    case Code::kConnectionError: return "connection-error";
    case Code::kBootstrapTimeout: return "bootstrap-timeout";
    case Code::kTooManyWorkers: return "too-many-workers";
    case Code::kChannelBroken: return "channel-broken";
    case Code::kIoError: return "io-error";
    case Code::kInternalError: return "internal-error";
    case Code::kVerificationFailed: return "verification-failed";
  }
  return "unknown";
}

std::string Status::to_string() const {
  if (ok()) return "ok";
  std::string s = code_name(code_);
  if (!msg_.empty()) {
    s += ": ";
    s += msg_;
  }
  return s;
}

}  // namespace distdf
