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

#include <iosfwd>
#include <optional>

#include "distdf/bench/datagen.hpp"
#include "distdf/dist/dist_ops.hpp"

namespace distdf::bench {

enum class BenchOp { kJoin, kGroupby, kAgg, kSort };
enum class ScaleMode { kStrong, kWeak };
enum class TransportKind { kInProc, kTcp };
enum class ReportFormat { kJsonLines, kCsv, kPretty };

Result<BenchOp> parse_bench_op(const std::string &s);
const char *bench_op_name(BenchOp op);

struct BenchConfig {
  BenchOp op = BenchOp::kJoin;
  // weak mode: rows per worker; strong mode: total rows split across workers.
  int64_t rows_per_worker = 100000;
  double unique_fraction = 0.9;
  int world_size = 1;
  uint64_t seed = 42;
  ScaleMode mode = ScaleMode::kWeak;
  TransportKind transport = TransportKind::kInProc;
  std::string store_address;  // tcp bootstrap store; embedded server when empty
  int repetitions = 3;
  bool verify = false;
  int corrupt_rank = -1;  // fault injection: flip one value in that worker's input
  int64_t ddof = 1;
  std::chrono::milliseconds timeout{60000};

  int64_t resolved_rows_per_worker() const {
    return mode == ScaleMode::kWeak ? rows_per_worker
                                    : rows_per_worker / std::max(1, world_size);
  }
  int64_t total_rows() const { return resolved_rows_per_worker() * world_size; }
};

struct RepRecord {
  int rep = 0;
  int64_t wall_ns = 0;
  TimingBreakdown timing;
  int64_t rows_in = 0;
  int64_t rows_out = 0;
};

struct WorkerReport {
  int rank = 0;
  std::vector<RepRecord> reps;
  bool verified = true;  // meaningful on rank 0 when cfg.verify is set
};

struct BenchReport {
  BenchConfig config;
  // Per repetition, merged across workers: phase and wall times take the
  // slowest worker (the BSP critical path); row counts are summed.
  std::vector<RepRecord> reps;
  bool verified = true;

  int64_t median_wall_ns() const;
  TimingBreakdown median_timing() const;
};

// Runs the configured operator on an already-bootstrapped worker. Generates
// this worker's relations from (seed, rank), times repetitions, and when
// cfg.verify is set gathers outputs to rank 0 and checks them against the
// single-process oracle on regenerated inputs.
Result<WorkerReport> run_worker(const BenchConfig &cfg, std::shared_ptr<oob::OOBContext> oob,
                                net::Transport &transport);

// Spawns world_size workers (threads for inproc, OS processes for tcp; tcp
// mode bootstraps through the kv rendezvous, starting an embedded store if no
// address is given), merges their reports, and propagates failures.
// kVerificationFailed and kBootstrapTimeout surface as those status codes.
Result<BenchReport> launch_local(const BenchConfig &cfg);

Status emit_report(const BenchReport &report, ReportFormat format, std::ostream &out);

// Entry point for the hidden worker-process mode; returns the process exit
// code (0 ok, 2 verification failure, 3 bootstrap timeout).
int internal_worker_main(const std::string &envelope_path);

// JSON (de)serialization used for the worker process boundary.
std::string config_to_json(const BenchConfig &cfg);
Result<BenchConfig> config_from_json(const std::string &json_text);
std::string worker_report_to_json(const WorkerReport &report);
Result<WorkerReport> worker_report_from_json(const std::string &json_text);

}  // namespace distdf::bench
