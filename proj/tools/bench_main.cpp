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

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "distdf/bench/bench.hpp"

using namespace distdf;
using namespace distdf::bench;

namespace {

// exit codes: 0 ok, 1 error, 2 verification failure, 3 bootstrap timeout
int status_exit_code(const Status &st) {
  if (st.ok()) return 0;
  if (st.code() == Code::kVerificationFailed) return 2;
  if (st.code() == Code::kBootstrapTimeout) return 3;
  return 1;
}

std::vector<int> parse_world_list(const std::string &s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

}  // namespace

int main(int argc, char **argv) {
  // Hidden worker-process mode used by the tcp launcher.
  if (argc == 3 && std::string(argv[1]) == "--internal-worker") {
    return internal_worker_main(argv[2]);
  }

  CLI::App app{"distdf bench: distributed dataframe operator benchmarks"};

  BenchConfig cfg;
  std::string op_name = "join";
  std::string mode_name = "weak";
  std::string transport_name = "inproc";
  std::string format_name = "pretty";
  std::string out_path;
  std::string sweep_worlds;

  app.add_option("--op", op_name, "operator: join | groupby | agg | sort")
      ->check(CLI::IsMember({"join", "groupby", "agg", "sort"}));
  app.add_option("--mode", mode_name, "weak (fixed rows/worker) or strong (fixed total rows)")
      ->check(CLI::IsMember({"weak", "strong"}));
  app.add_option("--rows-per-worker", cfg.rows_per_worker,
                 "rows per worker (weak) or total rows (strong)");
  app.add_option("--world-size", cfg.world_size, "number of workers");
  app.add_option("--unique-fraction", cfg.unique_fraction,
                 "key domain = ceil(total_rows * fraction)");
  app.add_option("--seed", cfg.seed, "data generator seed");
  app.add_option("--transport", transport_name, "inproc (threads) or tcp (processes)")
      ->check(CLI::IsMember({"inproc", "tcp"}));
  app.add_option("--store", cfg.store_address,
                 "rendezvous store host:port (tcp mode); falls back to DISTDF_STORE, then an "
                 "embedded store");
  app.add_option("--repetitions", cfg.repetitions, "timed repetitions per run");
  app.add_flag("--verify", cfg.verify, "check the distributed result against the oracle");
  app.add_option("--out", out_path, "write the report here instead of stdout");
  app.add_option("--format", format_name, "json-lines | csv | pretty")
      ->check(CLI::IsMember({"json-lines", "csv", "pretty"}));
  app.add_option("--timeout-ms", cfg.timeout, "bootstrap and collective timeout")
      ->transform(CLI::AsNumberWithUnit(std::map<std::string, int64_t>{{"ms", 1}}));
  app.add_option("--sweep-worlds", sweep_worlds,
                 "comma-separated world sizes; runs one benchmark per entry");
  app.add_option("--corrupt-rank", cfg.corrupt_rank)->group("");  // fault injection, hidden
  app.add_option("--ddof", cfg.ddof)->group("");

  CLI11_PARSE(app, argc, argv);

  auto op = parse_bench_op(op_name);
  if (!op.ok()) {
    std::cerr << op.status().to_string() << "\n";
    return 1;
  }
  cfg.op = op.value();
  cfg.mode = mode_name == "weak" ? ScaleMode::kWeak : ScaleMode::kStrong;
  cfg.transport = transport_name == "inproc" ? TransportKind::kInProc : TransportKind::kTcp;
  ReportFormat format = format_name == "json-lines" ? ReportFormat::kJsonLines
                        : format_name == "csv"      ? ReportFormat::kCsv
                                                    : ReportFormat::kPretty;

  std::vector<int> worlds = sweep_worlds.empty() ? std::vector<int>{cfg.world_size}
                                                 : parse_world_list(sweep_worlds);

  std::ostringstream buffer;
  int exit_code = 0;
  for (int w : worlds) {
    BenchConfig run_cfg = cfg;
    run_cfg.world_size = w;
    auto report = launch_local(run_cfg);
    if (!report.ok()) {
      std::cerr << "bench failed: " << report.status().to_string() << "\n";
      exit_code = status_exit_code(report.status());
      if (exit_code == 0) exit_code = 1;
      break;
    }
    Status st = emit_report(report.value(), format, buffer);
    if (!st.ok()) {
      std::cerr << st.to_string() << "\n";
      exit_code = 1;
      break;
    }
    if (run_cfg.verify && !report.value().verified) {
      std::cerr << "verification FAILED against the single-process oracle\n";
      exit_code = 2;
    }
  }

  if (out_path.empty()) {
    std::cout << buffer.str();
  } else {
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) {
      std::cerr << "cannot write " << out_path << "\n";
      return 1;
    }
    out << buffer.str();
  }
  return exit_code;
}
