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

#include "distdf/oob/oob_context.hpp"

#include <cstdlib>

#include "distdf/oob/resp.hpp"

namespace distdf::oob {

Result<std::vector<Bytes>> StaticExchange::exchange_endpoints(int rank, const Bytes &my_addr,
                                                              std::chrono::milliseconds timeout) {
  std::unique_lock<std::mutex> lock(mu_);
  if (endpoints_.slots.empty()) endpoints_.slots.resize(static_cast<size_t>(world_size_));
  endpoints_.slots[static_cast<size_t>(rank)] = my_addr;
  endpoints_.arrived++;
  cv_.notify_all();
  auto deadline = std::chrono::steady_clock::now() + timeout;
  while (endpoints_.arrived < world_size_) {
    if (cv_.wait_until(lock, deadline) == std::cv_status::timeout) {
      return Status(Code::kBootstrapTimeout, "static endpoint exchange timed out");
    }
  }
  return endpoints_.slots;
}

Result<Bytes> StaticExchange::allgather(int rank, uint64_t op_id, const Bytes &local,
                                        size_t item_size, std::chrono::milliseconds timeout) {
  if (local.size() != item_size) {
    return Status(Code::kInvalidArgument, "local contribution does not match item_size");
  }
  std::unique_lock<std::mutex> lock(mu_);
  OpState &op = ops_[op_id];
  if (op.slots.empty()) op.slots.resize(static_cast<size_t>(world_size_));
  op.slots[static_cast<size_t>(rank)] = local;
  op.arrived++;
  cv_.notify_all();
  auto deadline = std::chrono::steady_clock::now() + timeout;
  while (op.arrived < world_size_) {
    if (cv_.wait_until(lock, deadline) == std::cv_status::timeout) {
      return Status(Code::kBootstrapTimeout,
                    "static allgather op " + std::to_string(op_id) + " timed out");
    }
  }
  Bytes out;
  out.reserve(static_cast<size_t>(world_size_) * item_size);
  for (const auto &slot : op.slots) {
    if (slot.size() != item_size) {
      return Status(Code::kProtocolViolation, "contribution size mismatch in static allgather");
    }
    out.insert(out.end(), slot.begin(), slot.end());
  }
  return out;
}

namespace {

class KVStoreOOBContext : public OOBContext {
 public:
  KVStoreOOBContext(std::shared_ptr<KVStoreClient> client, RendezvousConfig cfg, int rank)
      : client_(std::move(client)), cfg_(std::move(cfg)), rank_(rank) {}

  int world_size() const override { return cfg_.world_size; }
  int rank() const override { return rank_; }

  Result<Bytes> oob_allgather(uint64_t op_id, const Bytes &local, size_t item_size) override {
    return kv_allgather(*client_, cfg_, rank_, op_id, local, item_size);
  }

  Result<std::vector<Bytes>> exchange_endpoints(const Bytes &my_addr) override {
    return oob::exchange_endpoints(*client_, cfg_, rank_, my_addr);
  }

  Status teardown() override { return teardown_job(*client_, cfg_, issued_op_ids()); }

 private:
  std::shared_ptr<KVStoreClient> client_;
  RendezvousConfig cfg_;
  int rank_;
};

class StaticOOBContext : public OOBContext {
 public:
  StaticOOBContext(std::shared_ptr<StaticExchange> exchange, int rank,
                   std::chrono::milliseconds timeout)
      : exchange_(std::move(exchange)), rank_(rank), timeout_(timeout) {}

  int world_size() const override { return exchange_->world_size(); }
  int rank() const override { return rank_; }

  Result<Bytes> oob_allgather(uint64_t op_id, const Bytes &local, size_t item_size) override {
    return exchange_->allgather(rank_, op_id, local, item_size, timeout_);
  }

  Result<std::vector<Bytes>> exchange_endpoints(const Bytes &my_addr) override {
    return exchange_->exchange_endpoints(rank_, my_addr, timeout_);
  }

  Status teardown() override { return Status::OK(); }

 private:
  std::shared_ptr<StaticExchange> exchange_;
  int rank_;
  std::chrono::milliseconds timeout_;
};

}  // namespace

Result<std::shared_ptr<OOBContext>> make_oob_context(OOBKind kind, const OOBParams &params) {
  switch (kind) {
    case OOBKind::kKVStore: {
      RendezvousConfig cfg = params.rendezvous;
      if (cfg.store_address.empty()) {
        const char *env = std::getenv("DISTDF_STORE");
        if (env != nullptr) cfg.store_address = env;
      }
      std::shared_ptr<KVStoreClient> client = params.client;
      if (!client) {
        if (cfg.store_address.empty()) {
          return Status(Code::kInvalidArgument,
                        "no store address given and DISTDF_STORE is unset");
        }
        auto dialed = RespClient::Connect(cfg.store_address, cfg.timeout);
        if (!dialed.ok()) return dialed.status();
        client = std::shared_ptr<KVStoreClient>(dialed.take().release());
      }
      auto rank = acquire_rank(*client, cfg);
      if (!rank.ok()) return rank.status();
      return std::shared_ptr<OOBContext>(
          std::make_shared<KVStoreOOBContext>(std::move(client), std::move(cfg), rank.value()));
    }
    case OOBKind::kStatic: {
      if (!params.exchange) {
        return Status(Code::kInvalidArgument, "static context requires a shared exchange");
      }
      if (params.static_rank < 0 || params.static_rank >= params.exchange->world_size()) {
        return Status(Code::kInvalidArgument, "static rank out of range");
      }
      return std::shared_ptr<OOBContext>(std::make_shared<StaticOOBContext>(
          params.exchange, params.static_rank, params.timeout));
    }
  }
  return Status(Code::kInvalidArgument, "unknown OOB context kind");
}

Result<std::shared_ptr<OOBContext>> make_oob_context(const std::string &kind,
                                                     const OOBParams &params) {
  if (kind == "kvstore") return make_oob_context(OOBKind::kKVStore, params);
  if (kind == "static") return make_oob_context(OOBKind::kStatic, params);
  return Status(Code::kInvalidArgument, "unknown OOB context kind '" + kind + "'");
}

}  // namespace distdf::oob
