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

#include "distdf/comm/transport.hpp"
#include "distdf/oob/oob_context.hpp"

namespace distdf::net {

// Frame header, exactly 24 bytes little-endian:
//   source_rank u32 | tag u32 | sequence u64 | payload_len u64
// (source, tag, sequence) is unique per connection; sequence increases by one
// per (source, tag) stream, which gives channels their FIFO guarantee.
struct FrameHeader {
  uint32_t source_rank = 0;
  uint32_t tag = 0;
  uint64_t sequence = 0;
  uint64_t payload_len = 0;
};

constexpr size_t kFrameHeaderBytes = 24;

void encode_frame_header(const FrameHeader &h, uint8_t out[kFrameHeaderBytes]);
FrameHeader decode_frame_header(const uint8_t in[kFrameHeaderBytes]);

// Lower 24 bits of a tag belong to user channels; the upper 8 bits carry the
// collective algorithm phase.
constexpr uint32_t kMaxUserTag = (1u << 24) - 1;

enum class ReduceOp { kSum, kMin, kMax, kLand, kLor };

// gather_v runs either with payloads flowing to the root only, or emulated by
// an allgather where non-root ranks receive into dummy space and discard.
enum class GatherMode { kDirect, kAllgatherEmulation };

class PendingOp {
 public:
  enum class State { kInFlight, kComplete, kFailed };

  bool is_recv() const { return is_recv_; }
  State state() const { return state_.load(std::memory_order_acquire); }
  const Status &error() const { return error_; }
  Bytes take_payload() { return std::move(payload_); }

 private:
  friend class Communicator;
  std::atomic<State> state_{State::kInFlight};
  Bytes payload_;
  Status error_;
  bool is_recv_ = false;
  int peer_ = -1;
  uint32_t tag_ = 0;
};

using OpHandle = std::shared_ptr<PendingOp>;

// Tagged nonblocking point-to-point channels over a transport plus the flat
// collective operators built on them. Owned by exactly one worker thread;
// collectives are blocking BSP steps from the caller's perspective. Readers
// run on internal threads, so progress() is not required for completion (the
// API contract does not rely on it).
class Communicator {
 public:
  // Listens, publishes the endpoint through the OOB context, dials all
  // higher ranks and accepts from all lower ranks.
  static Result<std::unique_ptr<Communicator>> Init(
      std::shared_ptr<oob::OOBContext> oob, Transport &transport,
      std::chrono::milliseconds timeout = std::chrono::milliseconds(60000));

  ~Communicator();
  Communicator(const Communicator &) = delete;
  Communicator &operator=(const Communicator &) = delete;

  int rank() const { return rank_; }
  int world_size() const { return world_size_; }

  // Point-to-point. Tags up to 24 bits; payload matching by (source, tag) in
  // sequence order. Self-sends short-circuit through a loopback queue.
  Result<OpHandle> isend(int target, uint32_t tag, Bytes payload);
  Result<OpHandle> irecv(int source, uint32_t tag);
  void progress();
  bool test(const OpHandle &op);  // local-only completion check
  Status wait(const OpHandle &op);
  Result<Bytes> wait_recv(const OpHandle &op);

  // Collectives (flat algorithms; every member must call in the same order).
  Status barrier();
  Result<Bytes> bcast_bytes(Bytes buf, int root);
  Result<std::vector<Bytes>> allgather_v(const Bytes &local);
  Result<std::vector<Bytes>> gather_v(const Bytes &local, int root,
                                      GatherMode mode = GatherMode::kDirect);
  Result<std::vector<int64_t>> allreduce_i64(const std::vector<int64_t> &values, ReduceOp op);
  Result<std::vector<double>> allreduce_f64(const std::vector<double> &values, ReduceOp op);

  // Channel-based AllToAll: phase 1 exchanges a size vector per pair, phase 2
  // the payload buffers; returns received buffer lists indexed by source.
  Result<std::vector<std::vector<Bytes>>> all_to_all_buffers(
      const std::vector<std::vector<Bytes>> &out);

  // Closes all channels, joins readers, and tears down the OOB job keys.
  Status shutdown();

 private:
  Communicator(std::shared_ptr<oob::OOBContext> oob, int rank, int world_size);

  struct PeerLink;
  struct Mailbox;

  Result<OpHandle> isend_tagged(int target, uint32_t tag, const Bytes &payload);
  Result<OpHandle> irecv_tagged(int source, uint32_t tag);
  void reader_loop(int peer);
  void deliver(int source, uint32_t tag, Bytes payload);
  void mark_broken(int peer, const std::string &why);

  std::shared_ptr<oob::OOBContext> oob_;
  int rank_;
  int world_size_;
  std::vector<std::unique_ptr<PeerLink>> links_;
  std::unique_ptr<Mailbox> mail_;
  std::atomic<bool> shut_down_{false};
};

}  // namespace distdf::net
