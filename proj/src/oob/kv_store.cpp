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

#include "distdf/oob/kv_store.hpp"

namespace distdf::oob {

Result<int64_t> InProcKVStore::incr(const std::string &key) {
  std::lock_guard<std::mutex> lock(mu_);
  int64_t current = 0;
  auto it = values_.find(key);
  if (it != values_.end()) {
    // stored as a decimal string, matching the external store's convention
    std::string s(it->second.begin(), it->second.end());
    try {
      current = std::stoll(s);
    } catch (...) {
      return Status(Code::kInvalidArgument, "value at '" + key + "' is not an integer");
    }
  }
  current++;
  std::string s = std::to_string(current);
  values_[key] = Bytes(s.begin(), s.end());
  return current;
}

Status InProcKVStore::set(const std::string &key, const Bytes &value) {
  std::lock_guard<std::mutex> lock(mu_);
  values_[key] = value;
  return Status::OK();
}

Result<std::optional<Bytes>> InProcKVStore::get(const std::string &key) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = values_.find(key);
  if (it == values_.end()) return std::optional<Bytes>{};
  return std::optional<Bytes>{it->second};
}

Status InProcKVStore::rpush(const std::string &key, const Bytes &value) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    lists_[key].push_back(value);
  }
  cv_.notify_all();
  return Status::OK();
}

Result<std::optional<Bytes>> InProcKVStore::blpop(const std::string &key,
                                                  std::chrono::milliseconds timeout) {
  std::unique_lock<std::mutex> lock(mu_);
  auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    auto it = lists_.find(key);
    if (it != lists_.end() && !it->second.empty()) {
      Bytes v = std::move(it->second.front());
      it->second.pop_front();
      return std::optional<Bytes>{std::move(v)};
    }
    if (shutdown_) return std::optional<Bytes>{};
    if (cv_.wait_until(lock, deadline) == std::cv_status::timeout) {
      return std::optional<Bytes>{};
    }
  }
}

Status InProcKVStore::del(const std::string &key) {
  std::lock_guard<std::mutex> lock(mu_);
  values_.erase(key);
  lists_.erase(key);
  return Status::OK();
}

void InProcKVStore::shutdown() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    shutdown_ = true;
  }
  cv_.notify_all();
}

int64_t InProcKVStore::list_len(const std::string &key) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = lists_.find(key);
  return it == lists_.end() ? 0 : static_cast<int64_t>(it->second.size());
}

}  // namespace distdf::oob
