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

#include <algorithm>
#include <iomanip>
#include <ostream>

#include <json.hpp>

#include "distdf/bench/bench.hpp"

namespace distdf::bench {

using ordered_json = nlohmann::ordered_json;

Result<BenchOp> parse_bench_op(const std::string &s) {
  if (s == "join") return BenchOp::kJoin;
  if (s == "groupby") return BenchOp::kGroupby;
  if (s == "agg") return BenchOp::kAgg;
  if (s == "sort") return BenchOp::kSort;
  return Status(Code::kInvalidArgument, "unknown op '" + s + "'");
}

const char *bench_op_name(BenchOp op) {
  switch (op) {
    case BenchOp::kJoin: return "join";
    case BenchOp::kGroupby: return "groupby";
    case BenchOp::kAgg: return "agg";
    case BenchOp::kSort: return "sort";
  }
  return "?";
}

namespace {

int64_t median_of(std::vector<int64_t> values) {
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];  // lower median
}

ordered_json rep_to_json(const RepRecord &r) {
  ordered_json j;
  j["rep"] = r.rep;
  j["wall_ns"] = r.wall_ns;
  j["partition_ns"] = r.timing.partition_ns;
  j["shuffle_ns"] = r.timing.shuffle_ns;
  j["local_compute_ns"] = r.timing.local_compute_ns;
  j["other_ns"] = r.timing.other_ns;
  j["rows_in"] = r.rows_in;
  j["rows_out"] = r.rows_out;
  return j;
}

RepRecord rep_from_json(const ordered_json &j) {
  RepRecord r;
  r.rep = j.at("rep").get<int>();
  r.wall_ns = j.at("wall_ns").get<int64_t>();
  r.timing.partition_ns = j.at("partition_ns").get<int64_t>();
  r.timing.shuffle_ns = j.at("shuffle_ns").get<int64_t>();
  r.timing.local_compute_ns = j.at("local_compute_ns").get<int64_t>();
  r.timing.other_ns = j.at("other_ns").get<int64_t>();
  r.rows_in = j.at("rows_in").get<int64_t>();
  r.rows_out = j.at("rows_out").get<int64_t>();
  return r;
}

ordered_json config_json(const BenchConfig &cfg) {
  ordered_json j;
  j["op"] = bench_op_name(cfg.op);
  j["mode"] = cfg.mode == ScaleMode::kWeak ? "weak" : "strong";
  j["transport"] = cfg.transport == TransportKind::kInProc ? "inproc" : "tcp";
  j["world_size"] = cfg.world_size;
  j["rows_per_worker"] = cfg.rows_per_worker;
  j["resolved_rows_per_worker"] = cfg.resolved_rows_per_worker();
  j["total_rows"] = cfg.total_rows();
  j["unique_fraction"] = cfg.unique_fraction;
  j["seed"] = cfg.seed;
  j["repetitions"] = cfg.repetitions;
  j["verify"] = cfg.verify;
  j["corrupt_rank"] = cfg.corrupt_rank;
  j["ddof"] = cfg.ddof;
  j["store"] = cfg.store_address;
  j["timeout_ms"] = cfg.timeout.count();
  return j;
}

}  // namespace

int64_t BenchReport::median_wall_ns() const {
  std::vector<int64_t> walls;
  for (const auto &r : reps) walls.push_back(r.wall_ns);
  return median_of(std::move(walls));
}

TimingBreakdown BenchReport::median_timing() const {
  TimingBreakdown t;
  std::vector<int64_t> p, s, l, o;
  for (const auto &r : reps) {
    p.push_back(r.timing.partition_ns);
    s.push_back(r.timing.shuffle_ns);
    l.push_back(r.timing.local_compute_ns);
    o.push_back(r.timing.other_ns);
  }
  t.partition_ns = median_of(std::move(p));
  t.shuffle_ns = median_of(std::move(s));
  t.local_compute_ns = median_of(std::move(l));
  t.other_ns = median_of(std::move(o));
  return t;
}

std::string config_to_json(const BenchConfig &cfg) { return config_json(cfg).dump(); }

Result<BenchConfig> config_from_json(const std::string &json_text) {
  ordered_json j = ordered_json::parse(json_text, nullptr, false);
  if (j.is_discarded()) return Status(Code::kInvalidArgument, "malformed config JSON");
  BenchConfig cfg;
  try {
    DISTDF_ASSIGN_OR_RAISE(cfg.op, parse_bench_op(j.at("op").get<std::string>()));
    cfg.mode = j.at("mode").get<std::string>() == "weak" ? ScaleMode::kWeak : ScaleMode::kStrong;
    cfg.transport = j.at("transport").get<std::string>() == "inproc" ? TransportKind::kInProc
                                                                     : TransportKind::kTcp;
    cfg.world_size = j.at("world_size").get<int>();
    cfg.rows_per_worker = j.at("rows_per_worker").get<int64_t>();
    cfg.unique_fraction = j.at("unique_fraction").get<double>();
    cfg.seed = j.at("seed").get<uint64_t>();
    cfg.repetitions = j.at("repetitions").get<int>();
    cfg.verify = j.at("verify").get<bool>();
    cfg.corrupt_rank = j.at("corrupt_rank").get<int>();
    cfg.ddof = j.at("ddof").get<int64_t>();
    cfg.store_address = j.at("store").get<std::string>();
    cfg.timeout = std::chrono::milliseconds(j.at("timeout_ms").get<int64_t>());
  } catch (const std::exception &e) {
    return Status(Code::kInvalidArgument, std::string("bad config JSON: ") + e.what());
  }
  return cfg;
}

std::string worker_report_to_json(const WorkerReport &report) {
  ordered_json j;
  j["rank"] = report.rank;
  j["verified"] = report.verified;
  j["reps"] = ordered_json::array();
  for (const auto &r : report.reps) j["reps"].push_back(rep_to_json(r));
  return j.dump();
}

Result<WorkerReport> worker_report_from_json(const std::string &json_text) {
  ordered_json j = ordered_json::parse(json_text, nullptr, false);
  if (j.is_discarded()) return Status(Code::kInvalidArgument, "malformed report JSON");
  WorkerReport report;
  try {
    report.rank = j.at("rank").get<int>();
    report.verified = j.at("verified").get<bool>();
    for (const auto &rj : j.at("reps")) report.reps.push_back(rep_from_json(rj));
  } catch (const std::exception &e) {
    return Status(Code::kInvalidArgument, std::string("bad report JSON: ") + e.what());
  }
  return report;
}

Status emit_report(const BenchReport &report, ReportFormat format, std::ostream &out) {
  if (report.reps.empty()) {
    return {Code::kInvalidArgument, "report carries no repetitions"};
  }
  switch (format) {
    case ReportFormat::kJsonLines: {
      ordered_json cfg = config_json(report.config);
      cfg["type"] = "config";
      out << cfg.dump() << "\n";
      for (const auto &r : report.reps) {
        ordered_json j = rep_to_json(r);
        j["type"] = "rep";
        out << j.dump() << "\n";
      }
      ordered_json s;
      s["type"] = "summary";
      s["op"] = bench_op_name(report.config.op);
      s["world_size"] = report.config.world_size;
      s["total_rows"] = report.config.total_rows();
      s["median_wall_ns"] = report.median_wall_ns();
      TimingBreakdown t = report.median_timing();
      s["median_partition_ns"] = t.partition_ns;
      s["median_shuffle_ns"] = t.shuffle_ns;
      s["median_local_compute_ns"] = t.local_compute_ns;
      s["median_other_ns"] = t.other_ns;
      s["rows_in"] = report.reps.front().rows_in;
      s["rows_out"] = report.reps.front().rows_out;
      s["verified"] = report.verified;
      out << s.dump() << "\n";
      return Status::OK();
    }
    case ReportFormat::kCsv: {
      out << "rep,wall_ns,partition_ns,shuffle_ns,local_compute_ns,other_ns,rows_in,rows_out\n";
      for (const auto &r : report.reps) {
        out << r.rep << ',' << r.wall_ns << ',' << r.timing.partition_ns << ','
            << r.timing.shuffle_ns << ',' << r.timing.local_compute_ns << ','
            << r.timing.other_ns << ',' << r.rows_in << ',' << r.rows_out << "\n";
      }
      return Status::OK();
    }
    case ReportFormat::kPretty: {
      const BenchConfig &c = report.config;
      out << "op=" << bench_op_name(c.op)
          << " mode=" << (c.mode == ScaleMode::kWeak ? "weak" : "strong")
          << " transport=" << (c.transport == TransportKind::kInProc ? "inproc" : "tcp")
          << " world_size=" << c.world_size << " rows/worker=" << c.resolved_rows_per_worker()
          << " total_rows=" << c.total_rows() << " seed=" << c.seed << "\n";
      out << std::left << std::setw(5) << "rep" << std::right << std::setw(14) << "wall_ms"
          << std::setw(14) << "partition_ms" << std::setw(14) << "shuffle_ms" << std::setw(14)
          << "local_ms" << std::setw(14) << "other_ms" << std::setw(12) << "rows_in"
          << std::setw(12) << "rows_out" << "\n";
      auto ms = [](int64_t ns) { return static_cast<double>(ns) / 1e6; };
      out << std::fixed << std::setprecision(3);
      for (const auto &r : report.reps) {
        out << std::left << std::setw(5) << r.rep << std::right << std::setw(14) << ms(r.wall_ns)
            << std::setw(14) << ms(r.timing.partition_ns) << std::setw(14)
            << ms(r.timing.shuffle_ns) << std::setw(14) << ms(r.timing.local_compute_ns)
            << std::setw(14) << ms(r.timing.other_ns) << std::setw(12) << r.rows_in
            << std::setw(12) << r.rows_out << "\n";
      }
      TimingBreakdown t = report.median_timing();
      int64_t med_wall = report.median_wall_ns();
      double shuffle_pct =
          med_wall > 0 ? 100.0 * static_cast<double>(t.shuffle_ns) / med_wall : 0.0;
      double local_pct =
          med_wall > 0 ? 100.0 * static_cast<double>(t.local_compute_ns) / med_wall : 0.0;
      out << "median wall " << ms(med_wall) << " ms; shuffle " << ms(t.shuffle_ns) << " ms ("
          << std::setprecision(1) << shuffle_pct << "%), local compute "
          << std::setprecision(3) << ms(t.local_compute_ns) << " ms (" << std::setprecision(1)
          << local_pct << "%)";
      if (report.config.verify) {
        out << "; verification " << (report.verified ? "PASSED" : "FAILED");
      }
      out << "\n";
      out.unsetf(std::ios::fixed);
      return Status::OK();
    }
  }
  return {Code::kInvalidArgument, "unknown report format"};
}

}  // namespace distdf::bench
