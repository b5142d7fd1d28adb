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

#include "distdf/comm/communicator.hpp"

#include <condition_variable>
#include <cstring>
#include <deque>
#include <map>
#include <mutex>

namespace distdf::net {

namespace {

// Collective phase tags live in the upper 8 bits; user channels keep the low
// 24. Successive collectives of the same kind are disambiguated by per-tag
// FIFO sequence order, since all members call collectives in one order.
enum Phase : uint32_t {
  kUserPhase = 0,
  kBarrierArrive = 1,
  kBarrierRelease = 2,
  kBcastPhase = 3,
  kGatherPhase = 4,
  kAllgatherPhase = 5,
  kA2ASizes = 6,
  kA2APayload = 7,
};

constexpr uint32_t make_tag(Phase phase, uint32_t sub = 0) {
  return (static_cast<uint32_t>(phase) << 24) | sub;
}

constexpr uint64_t kMaxPayload = 1ULL << 40;

// Clean EOF at a frame boundary reports 0 bytes; anything else is all-or-error.
Result<bool> stream_read_exact(Stream &s, uint8_t *buf, size_t n, bool at_boundary) {
  size_t got = 0;
  while (got < n) {
    DISTDF_ASSIGN_OR_RAISE(size_t r, s.read_some(buf + got, n - got));
    if (r == 0) {
      if (at_boundary && got == 0) return false;  // peer closed between frames
      return Status(Code::kChannelBroken, "stream closed mid-message");
    }
    got += r;
  }
  return true;
}

}  // namespace

void encode_frame_header(const FrameHeader &h, uint8_t out[kFrameHeaderBytes]) {
  out[0] = static_cast<uint8_t>(h.source_rank);
  out[1] = static_cast<uint8_t>(h.source_rank >> 8);
  out[2] = static_cast<uint8_t>(h.source_rank >> 16);
  out[3] = static_cast<uint8_t>(h.source_rank >> 24);
  out[4] = static_cast<uint8_t>(h.tag);
  out[5] = static_cast<uint8_t>(h.tag >> 8);
  out[6] = static_cast<uint8_t>(h.tag >> 16);
  out[7] = static_cast<uint8_t>(h.tag >> 24);
  le_store_u64(out + 8, h.sequence);
  le_store_u64(out + 16, h.payload_len);
}

FrameHeader decode_frame_header(const uint8_t in[kFrameHeaderBytes]) {
  FrameHeader h;
  h.source_rank = le_get_u32(in);
  h.tag = le_get_u32(in + 4);
  h.sequence = le_get_u64(in + 8);
  h.payload_len = le_get_u64(in + 16);
  return h;
}

struct Communicator::PeerLink {
  std::unique_ptr<Stream> stream;
  std::mutex send_mu;
  std::map<uint32_t, uint64_t> send_seq;  // per-tag, guarded by send_mu
  std::map<uint32_t, uint64_t> recv_seq;  // reader thread only
  std::thread reader;
  std::atomic<bool> broken{false};
  std::string broken_why;
};

struct Communicator::Mailbox {
  struct Key {
    int source;
    uint32_t tag;
    bool operator<(const Key &o) const {
      return source != o.source ? source < o.source : tag < o.tag;
    }
  };

  std::mutex mu;
  std::condition_variable cv;
  std::map<Key, std::deque<Bytes>> ready;
  std::map<Key, std::deque<OpHandle>> waiting;
};

Communicator::Communicator(std::shared_ptr<oob::OOBContext> oob, int rank, int world_size)
    : oob_(std::move(oob)),
      rank_(rank),
      world_size_(world_size),
      mail_(std::make_unique<Mailbox>()) {
  links_.resize(static_cast<size_t>(world_size));
}

Result<std::unique_ptr<Communicator>> Communicator::Init(std::shared_ptr<oob::OOBContext> oob,
                                                         Transport &transport,
                                                         std::chrono::milliseconds timeout) {
  const int rank = oob->rank();
  const int world_size = oob->world_size();
  DISTDF_ASSIGN_OR_RAISE(auto listener, transport.listen());
  std::string addr = listener->address();
  DISTDF_ASSIGN_OR_RAISE(auto endpoints,
                         oob->exchange_endpoints(Bytes(addr.begin(), addr.end())));
  if (static_cast<int>(endpoints.size()) != world_size) {
    return Status(Code::kProtocolViolation, "endpoint exchange returned a short list");
  }

  auto comm = std::unique_ptr<Communicator>(new Communicator(std::move(oob), rank, world_size));

  // Dial higher ranks, announcing our rank first; accept all lower ranks and
  // learn theirs. The fixed dial direction yields exactly one stream per pair.
  for (int q = rank + 1; q < world_size; q++) {
    const Bytes &ep = endpoints[static_cast<size_t>(q)];
    auto dialed = transport.connect(std::string(ep.begin(), ep.end()), timeout);
    if (!dialed.ok()) {
      return Status(Code::kConnectionError, "peer rank " + std::to_string(q) +
                                                " unreachable: " + dialed.status().message());
    }
    uint8_t hello[4];
    hello[0] = static_cast<uint8_t>(rank);
    hello[1] = static_cast<uint8_t>(rank >> 8);
    hello[2] = static_cast<uint8_t>(rank >> 16);
    hello[3] = static_cast<uint8_t>(rank >> 24);
    DISTDF_RETURN_NOT_OK(dialed.value()->write_all(hello, 4));
    auto link = std::make_unique<PeerLink>();
    link->stream = dialed.take();
    comm->links_[static_cast<size_t>(q)] = std::move(link);
  }
  for (int i = 0; i < rank; i++) {
    auto accepted = listener->accept(timeout);
    if (!accepted.ok()) {
      return Status(Code::kConnectionError,
                    "accept failed while awaiting lower ranks: " + accepted.status().message());
    }
    uint8_t hello[4];
    DISTDF_ASSIGN_OR_RAISE(bool got, stream_read_exact(*accepted.value(), hello, 4, false));
    (void)got;
    int peer = static_cast<int>(le_get_u32(hello));
    if (peer < 0 || peer >= rank || comm->links_[static_cast<size_t>(peer)] != nullptr) {
      return Status(Code::kProtocolViolation,
                    "unexpected hello from rank " + std::to_string(peer));
    }
    auto link = std::make_unique<PeerLink>();
    link->stream = accepted.take();
    comm->links_[static_cast<size_t>(peer)] = std::move(link);
  }
  listener->close();

  for (int q = 0; q < world_size; q++) {
    if (q == rank) continue;
    comm->links_[static_cast<size_t>(q)]->reader =
        std::thread([c = comm.get(), q] { c->reader_loop(q); });
  }
  return comm;
}

Communicator::~Communicator() { (void)shutdown(); }

Status Communicator::shutdown() {
  if (shut_down_.exchange(true)) return Status::OK();
  for (auto &link : links_) {
    if (link && link->stream) link->stream->close();
  }
  for (auto &link : links_) {
    if (link && link->reader.joinable()) link->reader.join();
  }
  return oob_->teardown();
}

void Communicator::reader_loop(int peer) {
  PeerLink &link = *links_[static_cast<size_t>(peer)];
  while (true) {
    uint8_t hdr[kFrameHeaderBytes];
    auto got = stream_read_exact(*link.stream, hdr, kFrameHeaderBytes, true);
    if (!got.ok()) {
      mark_broken(peer, got.status().message());
      return;
    }
    if (!got.value()) {
      mark_broken(peer, "peer closed the channel");
      return;
    }
    FrameHeader h = decode_frame_header(hdr);
    if (h.source_rank != static_cast<uint32_t>(peer) || h.payload_len > kMaxPayload) {
      mark_broken(peer, "malformed frame header");
      return;
    }
    uint64_t expected = link.recv_seq[h.tag]++;
    if (h.sequence != expected) {
      mark_broken(peer, "sequence number regression on tag " + std::to_string(h.tag));
      return;
    }
    Bytes payload(static_cast<size_t>(h.payload_len));
    if (h.payload_len > 0) {
      auto body = stream_read_exact(*link.stream, payload.data(), payload.size(), false);
      if (!body.ok() || !body.value()) {
        mark_broken(peer, "stream closed mid-message");
        return;
      }
    }
    deliver(peer, h.tag, std::move(payload));
  }
}

void Communicator::deliver(int source, uint32_t tag, Bytes payload) {
  Mailbox::Key key{source, tag};
  std::lock_guard<std::mutex> lock(mail_->mu);
  auto wit = mail_->waiting.find(key);
  if (wit != mail_->waiting.end() && !wit->second.empty()) {
    OpHandle op = std::move(wit->second.front());
    wit->second.pop_front();
    op->payload_ = std::move(payload);
    op->state_.store(PendingOp::State::kComplete, std::memory_order_release);
  } else {
    mail_->ready[key].push_back(std::move(payload));
  }
  mail_->cv.notify_all();
}

void Communicator::mark_broken(int peer, const std::string &why) {
  PeerLink &link = *links_[static_cast<size_t>(peer)];
  std::lock_guard<std::mutex> lock(mail_->mu);
  link.broken.store(true);
  link.broken_why = why;
  // Poison every pending op on this peer.
  for (auto &[key, queue] : mail_->waiting) {
    if (key.source != peer) continue;
    for (auto &op : queue) {
      op->error_ = Status(Code::kChannelBroken,
                          "channel to rank " + std::to_string(peer) + " broken: " + why);
      op->state_.store(PendingOp::State::kFailed, std::memory_order_release);
    }
    queue.clear();
  }
  mail_->cv.notify_all();
}

Result<OpHandle> Communicator::isend(int target, uint32_t tag, Bytes payload) {
  if (tag > kMaxUserTag) {
    return Status(Code::kInvalidArgument, "user tags are limited to 24 bits");
  }
  return isend_tagged(target, make_tag(kUserPhase, tag), payload);
}

Result<OpHandle> Communicator::irecv(int source, uint32_t tag) {
  if (tag > kMaxUserTag) {
    return Status(Code::kInvalidArgument, "user tags are limited to 24 bits");
  }
  return irecv_tagged(source, make_tag(kUserPhase, tag));
}

Result<OpHandle> Communicator::isend_tagged(int target, uint32_t tag, const Bytes &payload) {
  if (target < 0 || target >= world_size_) {
    return Status(Code::kInvalidArgument, "send target out of range");
  }
  auto op = std::make_shared<PendingOp>();
  op->is_recv_ = false;
  op->peer_ = target;
  op->tag_ = tag;

  if (target == rank_) {
    deliver(rank_, tag, payload);
    op->state_.store(PendingOp::State::kComplete, std::memory_order_release);
    return op;
  }

  PeerLink &link = *links_[static_cast<size_t>(target)];
  if (link.broken.load()) {
    return Status(Code::kChannelBroken,
                  "channel to rank " + std::to_string(target) + " broken: " + link.broken_why);
  }
  FrameHeader h;
  h.source_rank = static_cast<uint32_t>(rank_);
  h.tag = tag;
  h.payload_len = payload.size();
  uint8_t hdr[kFrameHeaderBytes];
  Status write_st;
  {
    std::lock_guard<std::mutex> lock(link.send_mu);
    h.sequence = link.send_seq[tag]++;
    encode_frame_header(h, hdr);
    write_st = link.stream->write_all(hdr, kFrameHeaderBytes);
    if (write_st.ok() && !payload.empty()) {
      write_st = link.stream->write_all(payload.data(), payload.size());
    }
  }
  if (!write_st.ok()) {
    mark_broken(target, write_st.message());
    op->error_ = Status(Code::kChannelBroken, "send to rank " + std::to_string(target) +
                                                  " failed: " + write_st.message());
    op->state_.store(PendingOp::State::kFailed, std::memory_order_release);
    return op;
  }
  op->state_.store(PendingOp::State::kComplete, std::memory_order_release);
  return op;
}

Result<OpHandle> Communicator::irecv_tagged(int source, uint32_t tag) {
  if (source < 0 || source >= world_size_) {
    return Status(Code::kInvalidArgument, "receive source out of range");
  }
  auto op = std::make_shared<PendingOp>();
  op->is_recv_ = true;
  op->peer_ = source;
  op->tag_ = tag;

  Mailbox::Key key{source, tag};
  std::lock_guard<std::mutex> lock(mail_->mu);
  auto rit = mail_->ready.find(key);
  if (rit != mail_->ready.end() && !rit->second.empty()) {
    op->payload_ = std::move(rit->second.front());
    rit->second.pop_front();
    op->state_.store(PendingOp::State::kComplete, std::memory_order_release);
    return op;
  }
  if (source != rank_ && links_[static_cast<size_t>(source)]->broken.load()) {
    op->error_ = Status(Code::kChannelBroken, "channel to rank " + std::to_string(source) +
                                                  " broken: " +
                                                  links_[static_cast<size_t>(source)]->broken_why);
    op->state_.store(PendingOp::State::kFailed, std::memory_order_release);
    return op;
  }
  mail_->waiting[key].push_back(op);
  return op;
}

void Communicator::progress() {
  // Reader threads drive I/O; nothing to pump. Kept so callers can follow the
  // isend/irecv/progress/wait idiom portably.
}

bool Communicator::test(const OpHandle &op) {
  return op->state() != PendingOp::State::kInFlight;
}

Status Communicator::wait(const OpHandle &op) {
  std::unique_lock<std::mutex> lock(mail_->mu);
  mail_->cv.wait(lock, [&] { return op->state() != PendingOp::State::kInFlight; });
  if (op->state() == PendingOp::State::kFailed) return op->error();
  return Status::OK();
}

Result<Bytes> Communicator::wait_recv(const OpHandle &op) {
  DISTDF_RETURN_NOT_OK(wait(op));
  return op->take_payload();
}

Status Communicator::barrier() {
  if (world_size_ == 1) return Status::OK();
  if (rank_ == 0) {
    std::vector<OpHandle> arrivals;
    for (int q = 1; q < world_size_; q++) {
      DISTDF_ASSIGN_OR_RAISE(auto h, irecv_tagged(q, make_tag(kBarrierArrive)));
      arrivals.push_back(std::move(h));
    }
    for (auto &h : arrivals) DISTDF_RETURN_NOT_OK(wait(h));
    for (int q = 1; q < world_size_; q++) {
      DISTDF_ASSIGN_OR_RAISE(auto h, isend_tagged(q, make_tag(kBarrierRelease), {}));
      DISTDF_RETURN_NOT_OK(wait(h));
    }
    return Status::OK();
  }
  DISTDF_ASSIGN_OR_RAISE(auto sent, isend_tagged(0, make_tag(kBarrierArrive), {}));
  DISTDF_RETURN_NOT_OK(wait(sent));
  DISTDF_ASSIGN_OR_RAISE(auto release, irecv_tagged(0, make_tag(kBarrierRelease)));
  return wait(release);
}

Result<Bytes> Communicator::bcast_bytes(Bytes buf, int root) {
  if (root < 0 || root >= world_size_) {
    return Status(Code::kInvalidArgument, "bcast root out of range");
  }
  if (world_size_ == 1) return buf;
  if (rank_ == root) {
    for (int q = 0; q < world_size_; q++) {
      if (q == root) continue;
      DISTDF_ASSIGN_OR_RAISE(auto h, isend_tagged(q, make_tag(kBcastPhase), buf));
      DISTDF_RETURN_NOT_OK(wait(h));
    }
    return buf;
  }
  DISTDF_ASSIGN_OR_RAISE(auto h, irecv_tagged(root, make_tag(kBcastPhase)));
  return wait_recv(h);
}

Result<std::vector<Bytes>> Communicator::allgather_v(const Bytes &local) {
  std::vector<Bytes> out(static_cast<size_t>(world_size_));
  out[static_cast<size_t>(rank_)] = local;
  if (world_size_ == 1) return out;
  for (int q = 0; q < world_size_; q++) {
    if (q == rank_) continue;
    DISTDF_ASSIGN_OR_RAISE(auto h, isend_tagged(q, make_tag(kAllgatherPhase), local));
    DISTDF_RETURN_NOT_OK(wait(h));
  }
  std::vector<OpHandle> recvs(static_cast<size_t>(world_size_));
  for (int q = 0; q < world_size_; q++) {
    if (q == rank_) continue;
    DISTDF_ASSIGN_OR_RAISE(recvs[static_cast<size_t>(q)],
                           irecv_tagged(q, make_tag(kAllgatherPhase)));
  }
  for (int q = 0; q < world_size_; q++) {
    if (q == rank_) continue;
    DISTDF_ASSIGN_OR_RAISE(out[static_cast<size_t>(q)],
                           wait_recv(recvs[static_cast<size_t>(q)]));
  }
  return out;
}

Result<std::vector<Bytes>> Communicator::gather_v(const Bytes &local, int root, GatherMode mode) {
  if (root < 0 || root >= world_size_) {
    return Status(Code::kInvalidArgument, "gather root out of range");
  }
  if (mode == GatherMode::kAllgatherEmulation) {
    // Dummy-space workaround: every rank runs the allgather and receives the
    // full result; non-root ranks discard it.
    DISTDF_ASSIGN_OR_RAISE(auto all, allgather_v(local));
    if (rank_ == root) return all;
    return std::vector<Bytes>{};
  }
  if (rank_ == root) {
    std::vector<Bytes> out(static_cast<size_t>(world_size_));
    out[static_cast<size_t>(root)] = local;
    std::vector<OpHandle> recvs(static_cast<size_t>(world_size_));
    for (int q = 0; q < world_size_; q++) {
      if (q == root) continue;
      DISTDF_ASSIGN_OR_RAISE(recvs[static_cast<size_t>(q)],
                             irecv_tagged(q, make_tag(kGatherPhase)));
    }
    for (int q = 0; q < world_size_; q++) {
      if (q == root) continue;
      DISTDF_ASSIGN_OR_RAISE(out[static_cast<size_t>(q)],
                             wait_recv(recvs[static_cast<size_t>(q)]));
    }
    return out;
  }
  DISTDF_ASSIGN_OR_RAISE(auto h, isend_tagged(root, make_tag(kGatherPhase), local));
  DISTDF_RETURN_NOT_OK(wait(h));
  return std::vector<Bytes>{};
}

namespace {

template <typename T>
Bytes encode_values(const std::vector<T> &values) {
  Bytes out(values.size() * 8);
  for (size_t i = 0; i < values.size(); i++) {
    uint64_t bits;
    std::memcpy(&bits, &values[i], 8);
    le_store_u64(out.data() + 8 * i, bits);
  }
  return out;
}

template <typename T>
std::vector<T> decode_values(const Bytes &b) {
  std::vector<T> out(b.size() / 8);
  for (size_t i = 0; i < out.size(); i++) {
    uint64_t bits = le_get_u64(b.data() + 8 * i);
    std::memcpy(&out[i], &bits, 8);
  }
  return out;
}

template <typename T>
Result<T> reduce_pair(T a, T b, ReduceOp op) {
  switch (op) {
    case ReduceOp::kSum:
      if constexpr (std::is_same_v<T, int64_t>) {
        return static_cast<int64_t>(static_cast<uint64_t>(a) + static_cast<uint64_t>(b));
      } else {
        return a + b;
      }
    case ReduceOp::kMin: return std::min(a, b);
    case ReduceOp::kMax: return std::max(a, b);
    case ReduceOp::kLand:
    case ReduceOp::kLor:
      if constexpr (std::is_same_v<T, int64_t>) {
        bool r = op == ReduceOp::kLand ? (a != 0 && b != 0) : (a != 0 || b != 0);
        return static_cast<int64_t>(r);
      } else {
        return Status(Code::kInvalidArgument, "logical reduction over float values");
      }
  }
  return Status(Code::kInvalidArgument, "unknown reduce op");
}

}  // namespace

// Folds strictly in rank order so every member computes the bitwise-identical
// result.
template <typename T>
static Result<std::vector<T>> allreduce_impl(Communicator &c, const std::vector<T> &values,
                                             ReduceOp op) {
  auto parts = c.allgather_v(encode_values(values));
  if (!parts.ok()) return parts.status();
  for (int q = 0; q < c.world_size(); q++) {
    if (parts.value()[static_cast<size_t>(q)].size() != values.size() * 8) {
      return Status(Code::kProtocolViolation,
                    "rank " + std::to_string(q) + " reduced a vector of different length");
    }
  }
  std::vector<T> acc = decode_values<T>(parts.value()[0]);
  for (int q = 1; q < c.world_size(); q++) {
    std::vector<T> other = decode_values<T>(parts.value()[static_cast<size_t>(q)]);
    for (size_t i = 0; i < acc.size(); i++) {
      auto folded = reduce_pair(acc[i], other[i], op);
      if (!folded.ok()) return folded.status();
      acc[i] = folded.value();
    }
  }
  return acc;
}

Result<std::vector<int64_t>> Communicator::allreduce_i64(const std::vector<int64_t> &values,
                                                         ReduceOp op) {
  return allreduce_impl(*this, values, op);
}

Result<std::vector<double>> Communicator::allreduce_f64(const std::vector<double> &values,
                                                        ReduceOp op) {
  if (op == ReduceOp::kLand || op == ReduceOp::kLor) {
    return Status(Code::kInvalidArgument, "logical reduction over float values");
  }
  return allreduce_impl(*this, values, op);
}

Result<std::vector<std::vector<Bytes>>> Communicator::all_to_all_buffers(
    const std::vector<std::vector<Bytes>> &out) {
  if (static_cast<int>(out.size()) != world_size_) {
    return Status(Code::kInvalidArgument, "all_to_all needs one buffer list per rank");
  }
  std::vector<std::vector<Bytes>> in(static_cast<size_t>(world_size_));
  in[static_cast<size_t>(rank_)] = out[static_cast<size_t>(rank_)];
  if (world_size_ == 1) return in;

  // Phase 1: per-pair size vectors (buffer count, then byte lengths).
  for (int q = 0; q < world_size_; q++) {
    if (q == rank_) continue;
    const auto &bufs = out[static_cast<size_t>(q)];
    Bytes sizes;
    le_put_u64(sizes, bufs.size());
    for (const auto &b : bufs) le_put_u64(sizes, b.size());
    DISTDF_ASSIGN_OR_RAISE(auto h, isend_tagged(q, make_tag(kA2ASizes), sizes));
    DISTDF_RETURN_NOT_OK(wait(h));
  }
  // Phase 2: payload buffers, one frame each, in order.
  for (int q = 0; q < world_size_; q++) {
    if (q == rank_) continue;
    for (const auto &b : out[static_cast<size_t>(q)]) {
      DISTDF_ASSIGN_OR_RAISE(auto h, isend_tagged(q, make_tag(kA2APayload), b));
      DISTDF_RETURN_NOT_OK(wait(h));
    }
  }
  // Receive both phases from every peer; completion is the full BSP step.
  for (int q = 0; q < world_size_; q++) {
    if (q == rank_) continue;
    DISTDF_ASSIGN_OR_RAISE(auto sh, irecv_tagged(q, make_tag(kA2ASizes)));
    DISTDF_ASSIGN_OR_RAISE(Bytes sizes, wait_recv(sh));
    if (sizes.size() < 8 || sizes.size() % 8 != 0) {
      return Status(Code::kProtocolViolation,
                    "rank " + std::to_string(q) + " sent a malformed size vector");
    }
    uint64_t count = le_get_u64(sizes.data());
    if (sizes.size() != 8 * (count + 1)) {
      return Status(Code::kProtocolViolation,
                    "rank " + std::to_string(q) + " sent a malformed size vector");
    }
    auto &bufs = in[static_cast<size_t>(q)];
    bufs.reserve(count);
    for (uint64_t b = 0; b < count; b++) {
      DISTDF_ASSIGN_OR_RAISE(auto ph, irecv_tagged(q, make_tag(kA2APayload)));
      DISTDF_ASSIGN_OR_RAISE(Bytes payload, wait_recv(ph));
      if (payload.size() != le_get_u64(sizes.data() + 8 * (b + 1))) {
        return Status(Code::kProtocolViolation,
                      "rank " + std::to_string(q) + " buffer size disagrees with its size vector");
      }
      bufs.push_back(std::move(payload));
    }
  }
  return in;
}

}  // namespace distdf::net
