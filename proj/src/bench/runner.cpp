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

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "distdf/bench/bench.hpp"
#include "distdf/oob/resp.hpp"

namespace distdf::bench {

namespace {

using Clock = std::chrono::steady_clock;

// Distinct stream for the right-hand relation of a join.
constexpr uint64_t kRightRelationSalt = 0x517CC1B727220A95ULL;

Result<Table> gen_relation(const BenchConfig &cfg, int rank, uint64_t salt) {
  return gen_table(cfg.resolved_rows_per_worker(), cfg.unique_fraction, cfg.seed ^ salt, rank,
                   cfg.total_rows());
}

// Fault injection: perturb one payload cell so verification must fail.
Table corrupt_first_payload(Table t) {
  if (t.num_rows() == 0) return t;
  Int64Builder b;
  const Column &payload = t.columns[1];
  for (int64_t i = 0; i < payload.length; i++) {
    b.append(payload.int64_at(i) + (i == 0 ? 1 : 0));
  }
  t.columns[1] = b.finish();
  return t;
}

bool approx_rel(double a, double b, double tol = 1e-9) {
  double diff = std::abs(a - b);
  double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return diff <= tol * scale;
}

std::vector<AggSpec> groupby_aggs() {
  return {{1, AggOp::kSum}, {1, AggOp::kMean}, {1, AggOp::kStd}};
}

// Grouped comparison keyed on the first column; float aggregates within 1e-9
// relative, everything else exact.
bool grouped_tables_match(const Table &got, const Table &want) {
  if (got.schema != want.schema || got.num_rows() != want.num_rows()) return false;
  std::map<int64_t, int64_t> want_row;
  for (int64_t r = 0; r < want.num_rows(); r++) want_row[want.columns[0].int64_at(r)] = r;
  for (int64_t r = 0; r < got.num_rows(); r++) {
    auto it = want_row.find(got.columns[0].int64_at(r));
    if (it == want_row.end()) return false;
    int64_t wr = it->second;
    for (int64_t c = 1; c < got.num_cols(); c++) {
      const Column &gc = got.columns[static_cast<size_t>(c)];
      const Column &wc = want.columns[static_cast<size_t>(c)];
      if (gc.is_valid(r) != wc.is_valid(wr)) return false;
      if (!gc.is_valid(r)) continue;
      if (gc.dtype == DataType::kFloat64) {
        if (!approx_rel(gc.float64_at(r), wc.float64_at(wr))) return false;
      } else if (gc.int64_at(r) != wc.int64_at(wr)) {
        return false;
      }
    }
  }
  return true;
}

// Rank 0 regenerates every worker's pristine inputs, applies the
// single-process oracle, and compares against the gathered distributed output.
Result<bool> verify_at_root(DistContext &ctx, const BenchConfig &cfg, const Table &local_out,
                            const std::optional<Scalar> &scalar_out) {
  const int w = ctx.world_size();
  if (cfg.op == BenchOp::kAgg) {
    if (ctx.rank() != 0) return true;
    Int64Builder all;
    for (int q = 0; q < w; q++) {
      DISTDF_ASSIGN_OR_RAISE(Table t, gen_relation(cfg, q, 0));
      for (int64_t i = 0; i < t.num_rows(); i++) all.append(t.columns[1].int64_at(i));
    }
    DISTDF_ASSIGN_OR_RAISE(Scalar oracle, column_reduce(all.finish(), ReduceKind::kSum));
    return scalar_out.has_value() && *scalar_out == oracle;
  }

  DISTDF_ASSIGN_OR_RAISE(auto gathered_parts, net::gather_table(ctx.comm(), local_out, 0));
  if (ctx.rank() != 0) return true;
  DISTDF_ASSIGN_OR_RAISE(Table gathered, concat_tables(gathered_parts));

  std::vector<Table> lefts, rights;
  for (int q = 0; q < w; q++) {
    DISTDF_ASSIGN_OR_RAISE(Table t, gen_relation(cfg, q, 0));
    lefts.push_back(std::move(t));
    if (cfg.op == BenchOp::kJoin) {
      DISTDF_ASSIGN_OR_RAISE(Table rt, gen_relation(cfg, q, kRightRelationSalt));
      rights.push_back(std::move(rt));
    }
  }
  DISTDF_ASSIGN_OR_RAISE(Table all_left, concat_tables(lefts));

  switch (cfg.op) {
    case BenchOp::kJoin: {
      DISTDF_ASSIGN_OR_RAISE(Table all_right, concat_tables(rights));
      DISTDF_ASSIGN_OR_RAISE(Table oracle, local_join(all_left, all_right, {0}, {0}));
      return tables_equal_as_multisets(gathered, oracle);
    }
    case BenchOp::kGroupby: {
      DISTDF_ASSIGN_OR_RAISE(Table oracle, local_groupby(all_left, {0}, groupby_aggs(), cfg.ddof));
      return grouped_tables_match(gathered, oracle);
    }
    case BenchOp::kSort: {
      DISTDF_ASSIGN_OR_RAISE(Table oracle, local_sort(all_left, {0}));
      if (!tables_equal_as_multisets(gathered, oracle)) return false;
      for (int64_t i = 0; i < gathered.num_rows(); i++) {
        if (gathered.columns[0].int64_at(i) != oracle.columns[0].int64_at(i)) return false;
      }
      return true;
    }
    case BenchOp::kAgg:
      break;
  }
  return Status(Code::kInternalError, "unhandled op in verification");
}

}  // namespace

Result<WorkerReport> run_worker(const BenchConfig &cfg, std::shared_ptr<oob::OOBContext> oob,
                                net::Transport &transport) {
  DISTDF_ASSIGN_OR_RAISE(auto comm, net::Communicator::Init(std::move(oob), transport,
                                                            cfg.timeout));
  DistContext ctx(*comm);
  WorkerReport report;
  report.rank = ctx.rank();

  DISTDF_ASSIGN_OR_RAISE(Table left, gen_relation(cfg, ctx.rank(), 0));
  Table right;
  if (cfg.op == BenchOp::kJoin) {
    DISTDF_ASSIGN_OR_RAISE(right, gen_relation(cfg, ctx.rank(), kRightRelationSalt));
  }
  if (cfg.corrupt_rank == ctx.rank()) left = corrupt_first_payload(std::move(left));

  Table last_table;
  std::optional<Scalar> last_scalar;
  for (int rep = 0; rep < cfg.repetitions; rep++) {
    RepRecord rec;
    rec.rep = rep;
    rec.rows_in = left.num_rows() + right.num_rows();
    auto t0 = Clock::now();
    switch (cfg.op) {
      case BenchOp::kJoin: {
        DISTDF_ASSIGN_OR_RAISE(auto out, dist_join(ctx, left, right, {0}, {0}));
        rec.timing = out.timing;
        rec.rows_out = out.table.num_rows();
        last_table = std::move(out.table);
        break;
      }
      case BenchOp::kGroupby: {
        DISTDF_ASSIGN_OR_RAISE(auto out, dist_groupby(ctx, left, {0}, groupby_aggs(), cfg.ddof));
        rec.timing = out.timing;
        rec.rows_out = out.table.num_rows();
        last_table = std::move(out.table);
        break;
      }
      case BenchOp::kAgg: {
        DISTDF_ASSIGN_OR_RAISE(Scalar out,
                               dist_column_agg(ctx, left.columns[1], ReduceKind::kSum,
                                               &rec.timing));
        rec.rows_out = 1;
        last_scalar = out;
        break;
      }
      case BenchOp::kSort: {
        DISTDF_ASSIGN_OR_RAISE(Table out, dist_sort(ctx, left, {0}, &rec.timing));
        rec.rows_out = out.num_rows();
        last_table = std::move(out);
        break;
      }
    }
    rec.wall_ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
    report.reps.push_back(rec);
  }

  if (cfg.verify) {
    DISTDF_ASSIGN_OR_RAISE(report.verified, verify_at_root(ctx, cfg, last_table, last_scalar));
  }
  DISTDF_RETURN_NOT_OK(comm->barrier());
  DISTDF_RETURN_NOT_OK(comm->shutdown());
  return report;
}

namespace {

Result<BenchReport> merge_reports(const BenchConfig &cfg, std::vector<WorkerReport> workers) {
  BenchReport out;
  out.config = cfg;
  if (workers.empty()) return Status(Code::kInternalError, "no worker reports to merge");
  size_t n_reps = workers[0].reps.size();
  for (const auto &w : workers) {
    out.verified = out.verified && w.verified;
    n_reps = std::min(n_reps, w.reps.size());
  }
  // Per repetition the slowest worker is the BSP critical path; its whole
  // record (wall and phase split) represents the step. Row counts are summed.
  for (size_t i = 0; i < n_reps; i++) {
    RepRecord merged;
    merged.rep = static_cast<int>(i);
    for (const auto &w : workers) {
      const RepRecord &r = w.reps[i];
      if (r.wall_ns >= merged.wall_ns) {
        merged.wall_ns = r.wall_ns;
        merged.timing = r.timing;
      }
      merged.rows_in += r.rows_in;
      merged.rows_out += r.rows_out;
    }
    out.reps.push_back(merged);
  }
  return out;
}

Result<BenchReport> launch_threads(const BenchConfig &cfg) {
  net::InProcTransport transport;
  auto exchange = std::make_shared<oob::StaticExchange>(cfg.world_size);
  std::vector<Result<WorkerReport>> results(static_cast<size_t>(cfg.world_size),
                                            Status(Code::kInternalError, "worker never ran"));
  std::vector<std::thread> threads;
  for (int r = 0; r < cfg.world_size; r++) {
    threads.emplace_back([&, r] {
      oob::OOBParams params;
      params.exchange = exchange;
      params.static_rank = r;
      params.timeout = cfg.timeout;
      auto ctx = oob::make_oob_context(oob::OOBKind::kStatic, params);
      if (!ctx.ok()) {
        results[static_cast<size_t>(r)] = ctx.status();
        return;
      }
      results[static_cast<size_t>(r)] = run_worker(cfg, ctx.take(), transport);
    });
  }
  for (auto &t : threads) t.join();
  std::vector<WorkerReport> reports;
  for (auto &res : results) {
    if (!res.ok()) return res.status();
    reports.push_back(res.take());
  }
  return merge_reports(cfg, std::move(reports));
}

std::string random_job_id() {
  std::random_device rd;
  std::ostringstream os;
  os << "bench-" << std::hex << rd() << rd();
  return os.str();
}

Result<std::string> self_exe_path() {
  char buf[4096];
  ssize_t n = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n <= 0) return Status(Code::kIoError, "cannot resolve /proc/self/exe");
  buf[n] = '\0';
  return std::string(buf);
}

Status write_text_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) return {Code::kIoError, "cannot write " + path};
  out << text;
  out.close();
  if (!out) return {Code::kIoError, "short write to " + path};
  return Status::OK();
}

Result<std::string> read_text_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) return Status(Code::kIoError, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Result<BenchReport> launch_processes(const BenchConfig &cfg) {
  BenchConfig resolved = cfg;
  if (resolved.store_address.empty()) {
    const char *env = std::getenv("DISTDF_STORE");
    if (env != nullptr) resolved.store_address = env;
  }
  std::unique_ptr<oob::RespServer> embedded;
  if (resolved.store_address.empty()) {
    auto server = oob::RespServer::Start();
    if (!server.ok()) return server.status();
    embedded = server.take();
    resolved.store_address = embedded->address();
  }

  char dir_template[] = "/tmp/distdf-bench-XXXXXX";
  if (::mkdtemp(dir_template) == nullptr) {
    return Status(Code::kIoError, "mkdtemp failed");
  }
  std::string report_dir = dir_template;

  nlohmann::ordered_json envelope;
  envelope["config"] = nlohmann::ordered_json::parse(config_to_json(resolved));
  envelope["job_id"] = random_job_id();
  envelope["report_dir"] = report_dir;
  std::string envelope_path = report_dir + "/worker_config.json";
  DISTDF_RETURN_NOT_OK(write_text_file(envelope_path, envelope.dump()));

  DISTDF_ASSIGN_OR_RAISE(std::string exe, self_exe_path());
  std::vector<pid_t> children;
  for (int i = 0; i < resolved.world_size; i++) {
    pid_t pid = ::fork();
    if (pid < 0) return Status(Code::kIoError, "fork failed");
    if (pid == 0) {
      const char *argv[] = {exe.c_str(), "--internal-worker", envelope_path.c_str(), nullptr};
      ::execv(exe.c_str(), const_cast<char *const *>(argv));
      ::_exit(127);
    }
    children.push_back(pid);
  }

  bool any_verify_failure = false;
  bool any_bootstrap_timeout = false;
  bool any_crash = false;
  for (pid_t pid : children) {
    int wstatus = 0;
    if (::waitpid(pid, &wstatus, 0) < 0) {
      any_crash = true;
      continue;
    }
    if (WIFEXITED(wstatus)) {
      int code = WEXITSTATUS(wstatus);
      if (code == 2) any_verify_failure = true;
      else if (code == 3) any_bootstrap_timeout = true;
      else if (code != 0) any_crash = true;
    } else {
      any_crash = true;
    }
  }

  // Merge whatever reports were flushed.
  std::vector<WorkerReport> reports;
  for (int r = 0; r < resolved.world_size; r++) {
    auto text = read_text_file(report_dir + "/worker_" + std::to_string(r) + ".json");
    if (!text.ok()) continue;
    auto report = worker_report_from_json(text.value());
    if (report.ok()) reports.push_back(report.take());
  }
  if (any_bootstrap_timeout) {
    return Status(Code::kBootstrapTimeout, "a worker timed out during bootstrap");
  }
  if (any_crash || reports.size() != static_cast<size_t>(resolved.world_size)) {
    return Status(Code::kInternalError, "a worker crashed; partial reports in " + report_dir);
  }
  DISTDF_ASSIGN_OR_RAISE(BenchReport merged, merge_reports(resolved, std::move(reports)));
  merged.verified = merged.verified && !any_verify_failure;
  return merged;
}

}  // namespace

Result<BenchReport> launch_local(const BenchConfig &cfg) {
  if (cfg.world_size < 1) return Status(Code::kInvalidArgument, "world_size must be >= 1");
  if (cfg.repetitions < 1) return Status(Code::kInvalidArgument, "repetitions must be >= 1");
  if (cfg.transport == TransportKind::kInProc) return launch_threads(cfg);
  return launch_processes(cfg);
}

int internal_worker_main(const std::string &envelope_path) {
  auto text = read_text_file(envelope_path);
  if (!text.ok()) return 1;
  auto envelope = nlohmann::ordered_json::parse(text.value(), nullptr, false);
  if (envelope.is_discarded()) return 1;
  auto cfg = config_from_json(envelope.at("config").dump());
  if (!cfg.ok()) return 1;
  std::string job_id = envelope.at("job_id").get<std::string>();
  std::string report_dir = envelope.at("report_dir").get<std::string>();

  oob::OOBParams params;
  params.rendezvous.store_address = cfg.value().store_address;
  params.rendezvous.job_id = job_id;
  params.rendezvous.world_size = cfg.value().world_size;
  params.rendezvous.timeout = cfg.value().timeout;
  auto ctx = oob::make_oob_context(oob::OOBKind::kKVStore, params);
  if (!ctx.ok()) return ctx.status().code() == Code::kBootstrapTimeout ? 3 : 1;

  auto rank = ctx.value()->rank();
  net::TcpTransport transport;
  auto report = run_worker(cfg.value(), ctx.take(), transport);
  if (!report.ok()) {
    return report.status().code() == Code::kBootstrapTimeout ? 3 : 1;
  }
  std::string path = report_dir + "/worker_" + std::to_string(rank) + ".json";
  if (!write_text_file(path, worker_report_to_json(report.value())).ok()) return 1;
  if (cfg.value().verify && !report.value().verified) return 2;
  return 0;
}

}  // namespace distdf::bench
