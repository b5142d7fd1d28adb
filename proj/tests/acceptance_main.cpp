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

// Acceptance suite: end-to-end conformance checks over the whole stack, one
// criterion per function, one PASS/FAIL line each. Usage:
//   acceptance <path-to-bench-binary>

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "distdf/bench/bench.hpp"
#include "distdf/oob/resp.hpp"
#include "distdf/serialize/serialize.hpp"

namespace {

using namespace distdf;
using Clock = std::chrono::steady_clock;

std::string g_bench_path;

struct CheckFailure {
  std::string what;
};

void expect(bool cond, const std::string &what) {
  if (!cond) throw CheckFailure{what};
}

template <typename T>
T unwrap(Result<T> res, const std::string &what) {
  if (!res.ok()) throw CheckFailure{what + ": " + res.status().to_string()};
  return res.take();
}

void expect_ok(const Status &st, const std::string &what) {
  if (!st.ok()) throw CheckFailure{what + ": " + st.to_string()};
}

// ---------------------------------------------------------------------------
// shared helpers

using Rng = std::mt19937_64;

Column fuzz_column(Rng &rng, DataType dtype, int64_t rows) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double null_p = 0.15;
  switch (dtype) {
    case DataType::kInt64: {
      Int64Builder b;
      for (int64_t i = 0; i < rows; i++) {
        if (unit(rng) < null_p) b.append_null();
        else b.append(static_cast<int64_t>(rng()));
      }
      return b.finish();
    }
    case DataType::kFloat64: {
      Float64Builder b;
      std::uniform_real_distribution<double> d(-1e6, 1e6);
      for (int64_t i = 0; i < rows; i++) {
        if (unit(rng) < null_p) b.append_null();
        else b.append(d(rng));
      }
      return b.finish();
    }
    case DataType::kBool: {
      BoolBuilder b;
      for (int64_t i = 0; i < rows; i++) {
        if (unit(rng) < null_p) b.append_null();
        else b.append((rng() & 1) != 0);
      }
      return b.finish();
    }
    case DataType::kUtf8: {
      Utf8Builder b;
      for (int64_t i = 0; i < rows; i++) {
        if (unit(rng) < null_p) {
          b.append_null();
          continue;
        }
        size_t n = rng() % 16;  // includes empty strings
        std::string s;
        for (size_t k = 0; k < n; k++) s.push_back(static_cast<char>('a' + rng() % 26));
        b.append(s);
      }
      return b.finish();
    }
  }
  return {};
}

Table fuzz_table(Rng &rng, int64_t max_cols, int64_t max_rows) {
  int64_t n_cols = static_cast<int64_t>(rng() % (max_cols + 1));
  int64_t n_rows = n_cols == 0 ? 0 : static_cast<int64_t>(rng() % (max_rows + 1));
  Table t;
  for (int64_t c = 0; c < n_cols; c++) {
    auto dtype = static_cast<DataType>(rng() % 4);
    t.schema.fields.push_back({"c" + std::to_string(c), dtype});
    t.columns.push_back(fuzz_column(rng, dtype, n_rows));
  }
  return t;
}

int run_bench(const std::string &args) {
  // subprocess chatter goes to a log; the exit code is the assertion
  std::string cmd = g_bench_path + " " + args + " >> /tmp/distdf-acceptance-bench.log 2>&1";
  int wstatus = std::system(cmd.c_str());
  if (wstatus < 0) return -1;
  if (WIFEXITED(wstatus)) return WEXITSTATUS(wstatus);
  return -1;
}

// ---------------------------------------------------------------------------
// 1. Serialization round-trip over fuzzed tables

void criterion_serialization() {
  Rng rng(20240801);
  for (int i = 0; i < 1000; i++) {
    Table t = fuzz_table(rng, 6, 10000);
    SerializedTable s = serialize_table(t);
    expect(s.buffers.size() == static_cast<size_t>(3 * t.num_cols()),
           "buffer count must be 3 x n_cols");
    Table back = unwrap(deserialize_table(s), "deserialize");
    expect(back == t, "round-trip mismatch at table " + std::to_string(i));
  }
}

// ---------------------------------------------------------------------------
// 2. Bootstrap correctness over both store backends

struct BootstrapEvents {
  std::mutex mu;
  int64_t premature_gets = 0;
};

class CountingClient : public oob::KVStoreClient {
 public:
  CountingClient(std::shared_ptr<oob::KVStoreClient> inner,
                 std::shared_ptr<BootstrapEvents> events)
      : inner_(std::move(inner)), events_(std::move(events)) {}

  Result<int64_t> incr(const std::string &key) override { return inner_->incr(key); }
  Status set(const std::string &key, const Bytes &value) override {
    return inner_->set(key, value);
  }
  Result<std::optional<Bytes>> get(const std::string &key) override {
    auto res = inner_->get(key);
    if (res.ok() && !res.value().has_value() &&
        (key.find(":ep:") != std::string::npos || key.find(":data:") != std::string::npos)) {
      std::lock_guard<std::mutex> lock(events_->mu);
      events_->premature_gets++;
    }
    return res;
  }
  Status rpush(const std::string &key, const Bytes &value) override {
    return inner_->rpush(key, value);
  }
  Result<std::optional<Bytes>> blpop(const std::string &key,
                                     std::chrono::milliseconds timeout) override {
    return inner_->blpop(key, timeout);
  }
  Status del(const std::string &key) override { return inner_->del(key); }

 private:
  std::shared_ptr<oob::KVStoreClient> inner_;
  std::shared_ptr<BootstrapEvents> events_;
};

void bootstrap_trial(const std::function<std::shared_ptr<oob::KVStoreClient>()> &make_client,
                     const std::string &job, std::shared_ptr<BootstrapEvents> events) {
  constexpr int kW = 8;
  oob::RendezvousConfig cfg;
  cfg.job_id = job;
  cfg.world_size = kW;
  cfg.timeout = std::chrono::milliseconds(20000);
  std::vector<int> ranks(kW, -1);
  std::vector<Status> statuses(kW);
  std::vector<std::thread> threads;
  for (int i = 0; i < kW; i++) {
    threads.emplace_back([&, i] {
      auto client = std::make_shared<CountingClient>(make_client(), events);
      auto rank = oob::acquire_rank(*client, cfg);
      if (!rank.ok()) {
        statuses[static_cast<size_t>(i)] = rank.status();
        return;
      }
      ranks[static_cast<size_t>(i)] = rank.value();
      Bytes addr = {static_cast<uint8_t>('a' + rank.value())};
      auto eps = oob::exchange_endpoints(*client, cfg, rank.value(), addr);
      statuses[static_cast<size_t>(i)] = eps.status();
      if (eps.ok() && eps.value().size() != kW) {
        statuses[static_cast<size_t>(i)] = Status(Code::kInternalError, "short endpoint list");
      }
    });
  }
  for (auto &t : threads) t.join();
  for (const auto &st : statuses) expect_ok(st, "bootstrap worker");
  std::set<int> got(ranks.begin(), ranks.end());
  std::set<int> want;
  for (int r = 0; r < kW; r++) want.insert(r);
  expect(got == want, "acquired ranks must form {0..7}");
}

void criterion_bootstrap() {
  auto events = std::make_shared<BootstrapEvents>();

  // backend 1: in-process store
  for (int trial = 0; trial < 50; trial++) {
    auto store = std::make_shared<oob::InProcKVStore>();
    bootstrap_trial(
        [&] { return std::make_shared<oob::InProcKVClient>(store); },
        "acc2a-" + std::to_string(trial), events);
  }
  // backend 2: RESP client against the embedded server
  auto server = unwrap(oob::RespServer::Start(), "embedded store");
  for (int trial = 0; trial < 50; trial++) {
    bootstrap_trial(
        [&]() -> std::shared_ptr<oob::KVStoreClient> {
          auto client =
              oob::RespClient::Connect(server->address(), std::chrono::milliseconds(5000));
          expect(client.ok(), "store connect");
          return std::shared_ptr<oob::KVStoreClient>(client.take().release());
        },
        "acc2b-" + std::to_string(trial), events);
  }
  expect(events->premature_gets == 0, "no endpoint read may precede its sync pop");

  // withheld-worker trial: 2 of 3 workers arrive, both must time out cleanly
  for (int backend = 0; backend < 2; backend++) {
    auto store = std::make_shared<oob::InProcKVStore>();
    oob::RendezvousConfig cfg;
    cfg.job_id = "acc2-withheld-" + std::to_string(backend);
    cfg.world_size = 3;
    cfg.timeout = std::chrono::milliseconds(400);
    std::vector<Status> statuses(2);
    std::vector<std::thread> threads;
    for (int i = 0; i < 2; i++) {
      threads.emplace_back([&, i] {
        std::shared_ptr<oob::KVStoreClient> client;
        if (backend == 0) {
          client = std::make_shared<oob::InProcKVClient>(store);
        } else {
          auto dialed =
              oob::RespClient::Connect(server->address(), std::chrono::milliseconds(5000));
          expect(dialed.ok(), "store connect");
          client = std::shared_ptr<oob::KVStoreClient>(dialed.take().release());
        }
        auto rank = oob::acquire_rank(*client, cfg);
        if (!rank.ok()) {
          statuses[static_cast<size_t>(i)] = rank.status();
          return;
        }
        Bytes addr{1};
        statuses[static_cast<size_t>(i)] =
            oob::exchange_endpoints(*client, cfg, rank.value(), addr).status();
      });
    }
    for (auto &t : threads) t.join();
    for (const auto &st : statuses) {
      expect(st.code() == Code::kBootstrapTimeout,
             "withheld worker must end in bootstrap-timeout, got " + st.to_string());
    }
  }
}

// ---------------------------------------------------------------------------
// 3. OOB AllGather over interleaved op ids, both backends byte-identical

void criterion_oob_allgather() {
  constexpr int kW = 4;
  Rng rng(333);
  auto server = unwrap(oob::RespServer::Start(), "embedded store");
  for (int trial = 0; trial < 20; trial++) {
    auto exchange = std::make_shared<oob::StaticExchange>(kW);
    oob::RendezvousConfig cfg;
    cfg.job_id = "acc3-" + std::to_string(trial);
    cfg.world_size = kW;
    cfg.timeout = std::chrono::milliseconds(20000);

    std::vector<int> delays(kW);
    for (auto &d : delays) d = static_cast<int>(rng() % 30);
    // results[backend][rank][op]
    std::vector<std::vector<std::vector<Bytes>>> results(
        2, std::vector<std::vector<Bytes>>(kW, std::vector<Bytes>(3)));
    std::vector<Status> statuses(kW);
    std::vector<std::thread> threads;
    for (int r = 0; r < kW; r++) {
      threads.emplace_back([&, r] {
        auto dialed = oob::RespClient::Connect(server->address(), std::chrono::milliseconds(5000));
        if (!dialed.ok()) {
          statuses[static_cast<size_t>(r)] = dialed.status();
          return;
        }
        oob::OOBParams kv_params;
        kv_params.rendezvous = cfg;
        kv_params.client = std::shared_ptr<oob::KVStoreClient>(dialed.take().release());
        auto kv_ctx = oob::make_oob_context(oob::OOBKind::kKVStore, kv_params);
        if (!kv_ctx.ok()) {
          statuses[static_cast<size_t>(r)] = kv_ctx.status();
          return;
        }
        int kv_rank = kv_ctx.value()->rank();
        oob::OOBParams st_params;
        st_params.exchange = exchange;
        st_params.static_rank = kv_rank;
        auto st_ctx = oob::make_oob_context(oob::OOBKind::kStatic, st_params);
        if (!st_ctx.ok()) {
          statuses[static_cast<size_t>(r)] = st_ctx.status();
          return;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(delays[static_cast<size_t>(r)]));
        for (uint64_t op = 0; op < 3; op++) {
          Bytes local;
          le_put_u64(local, (op + 1) * 1000 + static_cast<uint64_t>(kv_rank));
          auto a = kv_ctx.value()->oob_allgather(op, local, 8);
          auto b = st_ctx.value()->oob_allgather(op, local, 8);
          if (!a.ok() || !b.ok()) {
            statuses[static_cast<size_t>(r)] = !a.ok() ? a.status() : b.status();
            return;
          }
          results[0][static_cast<size_t>(kv_rank)][op] = a.take();
          results[1][static_cast<size_t>(kv_rank)][op] = b.take();
        }
      });
    }
    for (auto &t : threads) t.join();
    for (const auto &st : statuses) expect_ok(st, "allgather worker");
    for (uint64_t op = 0; op < 3; op++) {
      Bytes want;
      for (uint64_t q = 0; q < kW; q++) le_put_u64(want, (op + 1) * 1000 + q);
      for (int r = 0; r < kW; r++) {
        expect(results[0][static_cast<size_t>(r)][op] == want,
               "kvstore allgather result must be the rank-ordered concatenation");
        expect(results[1][static_cast<size_t>(r)][op] == want,
               "static allgather result must be the rank-ordered concatenation");
        expect(results[0][static_cast<size_t>(r)][op] == results[1][static_cast<size_t>(r)][op],
               "backends must agree byte-for-byte");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// 4. Collective conformance over the in-process transport

struct GroupRunner {
  // Spawns w workers with communicators and runs fn; throws on any failure.
  static void run(int w, const std::function<Status(int, net::Communicator &)> &fn) {
    net::InProcTransport transport;
    auto exchange = std::make_shared<oob::StaticExchange>(w);
    std::vector<Status> statuses(static_cast<size_t>(w));
    std::vector<std::thread> threads;
    for (int r = 0; r < w; r++) {
      threads.emplace_back([&, r] {
        oob::OOBParams params;
        params.exchange = exchange;
        params.static_rank = r;
        auto ctx = oob::make_oob_context(oob::OOBKind::kStatic, params);
        if (!ctx.ok()) {
          statuses[static_cast<size_t>(r)] = ctx.status();
          return;
        }
        auto comm = net::Communicator::Init(ctx.take(), transport);
        if (!comm.ok()) {
          statuses[static_cast<size_t>(r)] = comm.status();
          return;
        }
        statuses[static_cast<size_t>(r)] = fn(r, *comm.value());
        auto shut = comm.value()->shutdown();
        if (statuses[static_cast<size_t>(r)].ok()) statuses[static_cast<size_t>(r)] = shut;
      });
    }
    for (auto &t : threads) t.join();
    for (size_t i = 0; i < statuses.size(); i++) {
      expect_ok(statuses[i], "collective worker " + std::to_string(i));
    }
  }
};

void criterion_collectives() {
  int cases = 0;
  for (int w : {1, 2, 4, 8}) {
    constexpr int kRounds = 10;
    GroupRunner::run(w, [&](int rank, net::Communicator &comm) -> Status {
      // deterministic per-(round, source) payloads derivable by every rank
      auto payload = [w](int source, int round) {
        Rng prng(static_cast<uint64_t>(w * 1000003 + source * 7919 + round));
        Bytes b(prng() % 64);
        for (auto &x : b) x = static_cast<uint8_t>(prng());
        return b;
      };
      for (int round = 0; round < kRounds; round++) {
        // allgather: agreement with the derivable expectation
        DISTDF_ASSIGN_OR_RAISE(auto all, comm.allgather_v(payload(rank, round)));
        for (int q = 0; q < w; q++) {
          if (all[static_cast<size_t>(q)] != payload(q, round)) {
            return {Code::kInternalError, "allgather disagreement"};
          }
        }
        // gather, both modes, every root
        int root = round % w;
        DISTDF_ASSIGN_OR_RAISE(auto direct,
                               comm.gather_v(payload(rank, round), root, net::GatherMode::kDirect));
        DISTDF_ASSIGN_OR_RAISE(
            auto emulated,
            comm.gather_v(payload(rank, round), root, net::GatherMode::kAllgatherEmulation));
        if (rank == root) {
          if (direct != emulated) return {Code::kInternalError, "gather modes disagree"};
          for (int q = 0; q < w; q++) {
            if (direct[static_cast<size_t>(q)] != payload(q, round)) {
              return {Code::kInternalError, "gather payload mismatch"};
            }
          }
        } else if (!direct.empty() || !emulated.empty()) {
          return {Code::kInternalError, "non-root gather must discard"};
        }
        // bcast
        Bytes bc = rank == root ? payload(root, round) : Bytes{};
        DISTDF_ASSIGN_OR_RAISE(bc, comm.bcast_bytes(std::move(bc), root));
        if (bc != payload(root, round)) return {Code::kInternalError, "bcast mismatch"};
        // allreduce agreement: sum of deterministic per-rank vectors
        std::vector<int64_t> vec(4);
        for (size_t i = 0; i < vec.size(); i++) {
          vec[i] = static_cast<int64_t>(rank + 1) * static_cast<int64_t>(i + round);
        }
        DISTDF_ASSIGN_OR_RAISE(auto reduced, comm.allreduce_i64(vec, net::ReduceOp::kSum));
        for (size_t i = 0; i < vec.size(); i++) {
          int64_t want = 0;
          for (int q = 1; q <= w; q++) want += q * static_cast<int64_t>(i + round);
          if (reduced[i] != want) return {Code::kInternalError, "allreduce mismatch"};
        }
        // alltoall transpose law on ragged deterministic buffers
        auto cell = [&](int from, int to) {
          Rng crng(static_cast<uint64_t>(round * 31 + from * 17 + to));
          std::vector<Bytes> bufs(crng() % 4);
          for (auto &b : bufs) {
            b.resize(crng() % 32);
            for (auto &x : b) x = static_cast<uint8_t>(crng());
          }
          return bufs;
        };
        std::vector<std::vector<Bytes>> out(static_cast<size_t>(w));
        for (int q = 0; q < w; q++) out[static_cast<size_t>(q)] = cell(rank, q);
        DISTDF_ASSIGN_OR_RAISE(auto in, comm.all_to_all_buffers(out));
        for (int q = 0; q < w; q++) {
          if (in[static_cast<size_t>(q)] != cell(q, rank)) {
            return {Code::kInternalError, "alltoall transpose violated"};
          }
        }
      }
      return Status::OK();
    });
    cases += kRounds * 5;  // five collective checks per round

    // barrier ordering with an induced straggler
    std::vector<Clock::time_point> entry(static_cast<size_t>(w)), exits(static_cast<size_t>(w));
    GroupRunner::run(w, [&](int rank, net::Communicator &comm) -> Status {
      if (rank == 0) std::this_thread::sleep_for(std::chrono::milliseconds(50));
      entry[static_cast<size_t>(rank)] = Clock::now();
      DISTDF_RETURN_NOT_OK(comm.barrier());
      exits[static_cast<size_t>(rank)] = Clock::now();
      return Status::OK();
    });
    auto max_entry = *std::max_element(entry.begin(), entry.end());
    auto min_exit = *std::min_element(exits.begin(), exits.end());
    expect(min_exit >= max_entry, "a rank left the barrier before all entered");
    cases += 1;
  }
  expect(cases >= 200, "need at least 200 randomized collective cases, ran " +
                           std::to_string(cases));
}

// ---------------------------------------------------------------------------
// 5. Operator oracle equivalence at w in {1,2,4,8}

Table bench_relation(int rank, int64_t rows, uint64_t seed, int w) {
  return unwrap(bench::gen_table(rows, 0.9, seed, rank, rows * w), "gen_table");
}

bool grouped_match(const Table &got, const Table &want) {
  if (got.schema != want.schema || got.num_rows() != want.num_rows()) return false;
  std::map<int64_t, int64_t> want_row;
  for (int64_t r = 0; r < want.num_rows(); r++) want_row[want.columns[0].int64_at(r)] = r;
  for (int64_t r = 0; r < got.num_rows(); r++) {
    auto it = want_row.find(got.columns[0].int64_at(r));
    if (it == want_row.end()) return false;
    for (int64_t c = 1; c < got.num_cols(); c++) {
      const Column &gc = got.columns[static_cast<size_t>(c)];
      const Column &wc = want.columns[static_cast<size_t>(c)];
      if (gc.is_valid(r) != wc.is_valid(it->second)) return false;
      if (!gc.is_valid(r)) continue;
      if (gc.dtype == DataType::kFloat64) {
        double a = gc.float64_at(r), b = wc.float64_at(it->second);
        double scale = std::max({1.0, std::abs(a), std::abs(b)});
        if (std::abs(a - b) > 1e-9 * scale) return false;
      } else if (gc.int64_at(r) != wc.int64_at(it->second)) {
        return false;
      }
    }
  }
  return true;
}

void criterion_operators() {
  for (int w : {1, 2, 4, 8}) {
    const int64_t rows = w == 4 ? 20000 : 10000;  // 10^4 - 10^5 rows per worker
    std::vector<Table> lefts, rights;
    for (int r = 0; r < w; r++) {
      lefts.push_back(bench_relation(r, rows, 101, w));
      rights.push_back(bench_relation(r, rows, 202, w));
    }
    Table all_left = unwrap(concat_tables(lefts), "concat");
    Table all_right = unwrap(concat_tables(rights), "concat");

    std::vector<Table> join_out(static_cast<size_t>(w)), group_out(static_cast<size_t>(w)),
        sort_out(static_cast<size_t>(w)), uniq_out(static_cast<size_t>(w)),
        diff_out(static_cast<size_t>(w)), bj_out(static_cast<size_t>(w));
    std::vector<Scalar> agg_out(static_cast<size_t>(w));
    std::vector<AggSpec> aggs = {{1, AggOp::kSum}, {1, AggOp::kMean}, {1, AggOp::kStd}};

    GroupRunner::run(w, [&](int rank, net::Communicator &comm) -> Status {
      DistContext ctx(comm);
      const Table &l = lefts[static_cast<size_t>(rank)];
      const Table &r = rights[static_cast<size_t>(rank)];
      DISTDF_ASSIGN_OR_RAISE(auto join, dist_join(ctx, l, r, {0}, {0}));
      join_out[static_cast<size_t>(rank)] = std::move(join.table);
      DISTDF_ASSIGN_OR_RAISE(auto group, dist_groupby(ctx, l, {0}, aggs, 1));
      group_out[static_cast<size_t>(rank)] = std::move(group.table);
      DISTDF_ASSIGN_OR_RAISE(agg_out[static_cast<size_t>(rank)],
                             dist_column_agg(ctx, l.columns[1], ReduceKind::kSum));
      DISTDF_ASSIGN_OR_RAISE(sort_out[static_cast<size_t>(rank)], dist_sort(ctx, l, {0}));
      DISTDF_ASSIGN_OR_RAISE(uniq_out[static_cast<size_t>(rank)], dist_unique(ctx, l, {0}));
      DISTDF_ASSIGN_OR_RAISE(diff_out[static_cast<size_t>(rank)],
                             dist_set_op(ctx, l, r, SetOpKind::kDifference));
      // broadcast_join against the rank-0-resident right side
      std::optional<Table> small;
      if (rank == 0) small = all_right;
      DISTDF_ASSIGN_OR_RAISE(bj_out[static_cast<size_t>(rank)],
                             broadcast_join(ctx, l, small, {0}, {0}, 0));
      return Status::OK();
    });

    // dist_join == oracle join (exact multiset)
    Table join_all = unwrap(concat_tables(join_out), "concat");
    Table join_oracle = unwrap(local_join(all_left, all_right, {0}, {0}), "oracle join");
    expect(tables_equal_as_multisets(join_all, join_oracle),
           "dist_join != oracle at w=" + std::to_string(w));

    // broadcast_join == dist_join == oracle (same global inputs)
    Table bj_all = unwrap(concat_tables(bj_out), "concat");
    expect(tables_equal_as_multisets(bj_all, join_oracle),
           "broadcast_join != dist_join/oracle at w=" + std::to_string(w));

    // dist_groupby == oracle groupby (1e-9 relative on float aggregates)
    Table group_all = unwrap(concat_tables(group_out), "concat");
    Table group_oracle = unwrap(local_groupby(all_left, {0}, aggs, 1), "oracle groupby");
    expect(grouped_match(group_all, group_oracle),
           "dist_groupby != oracle at w=" + std::to_string(w));

    // dist_column_agg == oracle reduce (exact int)
    Scalar agg_oracle = unwrap(column_reduce(all_left.columns[1], ReduceKind::kSum),
                               "oracle reduce");
    for (int r = 0; r < w; r++) {
      expect(agg_out[static_cast<size_t>(r)] == agg_oracle,
             "dist_column_agg != oracle at w=" + std::to_string(w));
    }

    // dist_sort: global order equals the oracle arrangement of keys
    Table sort_all = unwrap(concat_tables(sort_out), "concat");
    Table sort_oracle = unwrap(local_sort(all_left, {0}), "oracle sort");
    expect(tables_equal_as_multisets(sort_all, sort_oracle),
           "dist_sort multiset mismatch at w=" + std::to_string(w));
    expect(sort_all.num_rows() == sort_oracle.num_rows(), "sort row count");
    for (int64_t i = 0; i < sort_all.num_rows(); i++) {
      expect(sort_all.columns[0].int64_at(i) == sort_oracle.columns[0].int64_at(i),
             "dist_sort key order mismatch at w=" + std::to_string(w));
    }

    // dist_unique == oracle unique (as a key set)
    Table uniq_all = unwrap(concat_tables(uniq_out), "concat");
    std::set<int64_t> uniq_keys, oracle_keys;
    for (int64_t i = 0; i < uniq_all.num_rows(); i++) {
      expect(uniq_keys.insert(uniq_all.columns[0].int64_at(i)).second,
             "dist_unique key duplicated globally");
    }
    for (int64_t i = 0; i < all_left.num_rows(); i++) {
      oracle_keys.insert(all_left.columns[0].int64_at(i));
    }
    expect(uniq_keys == oracle_keys, "dist_unique key set mismatch");

    // dist_set_op difference == oracle set difference (exact set)
    Table diff_all = unwrap(concat_tables(diff_out), "concat");
    Table diff_oracle = unwrap(row_set_op(all_left, all_right, SetOpKind::kDifference),
                               "oracle difference");
    expect(tables_equal_as_multisets(diff_all, diff_oracle),
           "dist_set_op != oracle at w=" + std::to_string(w));
  }
}

// ---------------------------------------------------------------------------
// 6. Weak-scaling smoke over tcp: flat local-join time, clean breakdown

void criterion_weak_scaling() {
  std::map<int, int64_t> local_ms;
  for (int w : {1, 2, 4}) {
    std::string out = "/tmp/distdf-acc6-w" + std::to_string(w) + ".jsonl";
    int code = run_bench("--op join --mode weak --rows-per-worker 100000 --world-size " +
                         std::to_string(w) +
                         " --unique-fraction 0.9 --seed 42 --transport tcp --repetitions 3 "
                         "--format json-lines --out " +
                         out);
    expect(code == 0, "bench exited with " + std::to_string(code));
    std::ifstream in(out);
    expect(static_cast<bool>(in), "report file missing");
    std::string line;
    bool found = false;
    while (std::getline(in, line)) {
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || j.value("type", "") != "summary") continue;
      expect(j.contains("median_shuffle_ns") && j.contains("median_local_compute_ns"),
             "summary must separate shuffle from local time");
      local_ms[w] = j["median_local_compute_ns"].get<int64_t>();
      found = true;
    }
    expect(found, "no summary line in report");
    expect(local_ms[w] > 0, "local compute time must be positive");
  }
  int64_t lo = std::min({local_ms[1], local_ms[2], local_ms[4]});
  int64_t hi = std::max({local_ms[1], local_ms[2], local_ms[4]});
  expect(hi < 3 * lo,
         "median local-join wall time varies by >= 3x across w (" + std::to_string(local_ms[1]) +
             "/" + std::to_string(local_ms[2]) + "/" + std::to_string(local_ms[4]) +
             " ns); note: this host exposes " +
             std::to_string(std::thread::hardware_concurrency()) +
             " CPU core(s), so w concurrent local phases time-share the core and wall time "
             "inflates ~w-fold; the flat-compute trend needs >= w cores");
}

// ---------------------------------------------------------------------------
// 7. End-to-end CLI with verification and fault injection

void criterion_cli() {
  int ok = run_bench(
      "--op join --mode weak --rows-per-worker 20000 --world-size 4 --unique-fraction 0.9 "
      "--seed 42 --transport tcp --verify --out /tmp/distdf-acc7.jsonl --format json-lines");
  expect(ok == 0, "verified run must exit 0, got " + std::to_string(ok));
  int corrupted = run_bench(
      "--op join --mode weak --rows-per-worker 5000 --world-size 4 --transport tcp --verify "
      "--corrupt-rank 2 --out /tmp/distdf-acc7b.jsonl --format json-lines");
  expect(corrupted == 2, "corrupted run must exit 2, got " + std::to_string(corrupted));
}

struct Criterion {
  const char *name;
  std::function<void()> fn;
};

}  // namespace

int main(int argc, char **argv) {
  if (argc > 1) {
    g_bench_path = argv[1];
  } else {
    const char *env = std::getenv("DISTDF_BENCH_BIN");
    g_bench_path = env != nullptr ? env : "";
  }

  std::vector<Criterion> criteria = {
      {"1. serialization round-trip (1000 fuzzed tables, 3xN buffers)", criterion_serialization},
      {"2. bootstrap correctness (50 trials x w=8, both backends)", criterion_bootstrap},
      {"3. OOB allgather (20 trials, interleaved op ids, backends identical)",
       criterion_oob_allgather},
      {"4. collective conformance (w in {1,2,4,8}, >= 200 cases)", criterion_collectives},
      {"5. operator oracle equivalence (w in {1,2,4,8})", criterion_operators},
      {"6. weak-scaling smoke (tcp, flat local-join time)", criterion_weak_scaling},
      {"7. end-to-end CLI (verify exit 0, fault injection exit 2)", criterion_cli},
  };

  int failures = 0;
  for (auto &c : criteria) {
    bool needs_bench = std::string(c.name).front() == '6' || std::string(c.name).front() == '7';
    auto t0 = Clock::now();
    try {
      if (needs_bench && g_bench_path.empty()) {
        throw CheckFailure{"bench binary path not provided (argv[1] or DISTDF_BENCH_BIN)"};
      }
      c.fn();
      double secs = std::chrono::duration<double>(Clock::now() - t0).count();
      std::printf("[PASS] %s (%.1f s)\n", c.name, secs);
    } catch (const CheckFailure &f) {
      double secs = std::chrono::duration<double>(Clock::now() - t0).count();
      std::printf("[FAIL] %s (%.1f s): %s\n", c.name, secs, f.what.c_str());
      failures++;
    }
    std::fflush(stdout);
  }
  if (failures == 0) {
    std::printf("acceptance: all %zu criteria passed\n", criteria.size());
  } else {
    std::printf("acceptance: %d of %zu criteria FAILED\n", failures, criteria.size());
  }
  return failures == 0 ? 0 : 1;
}
