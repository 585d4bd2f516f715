#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "byzgather/harness.hpp"

namespace fs = std::filesystem;
using namespace byzgather;

namespace {

void print_verdict(std::ostream& out, const ScenarioResult& r) {
  const auto& v = r.verdict;
  out << "scenario: " << r.config.id() << '\n'
      << "X_N: " << r.x << '\n'
      << "gathered: " << std::boolalpha << v.gathered << '\n'
      << "same_node: " << v.same_node << '\n'
      << "same_round: " << v.same_round << '\n'
      << "first_good_wake: " << v.first_good_wake << '\n'
      << "last_termination_round: " << v.last_termination_round << '\n'
      << "elapsed: " << v.metrics.elapsed << '\n'
      << "bound_NS: " << v.bound_ns << '\n'
      << "bound_SIM: " << v.bound_sim << '\n'
      << "bound_satisfied: " << v.bound_satisfied << '\n'
      << "first_group_round: " << v.metrics.first_group_round << '\n'
      << "mgst_phases: " << v.metrics.mgst_phases << '\n'
      << "max_blacklist: " << v.metrics.max_blacklist << '\n';
  for (const auto& [name, ok] : v.lemma_checks) out << "check " << name << ": " << (ok ? "pass" : "FAIL") << '\n';
  for (const auto& note : v.notes) out << "note: " << note << '\n';
  out << "result: " << (r.pass ? "PASS" : "FAIL") << '\n';
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  return out;
}

std::string trace_text(const ScenarioResult& r) {
  std::ostringstream os;
  write_trace_file(os, r);
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and verifier for Byzantine-tolerant mobile-agent gathering"};
  app.require_subcommand(1);

  std::string out_dir;
  std::optional<Round> cap;
  bool csv = false;
  std::string cache_dir;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_dir, "Directory for traces, CSV and verdicts");
    cmd->add_option("--cap", cap, "Round cap (overrides the scenario)");
    cmd->add_flag("--csv", csv, "Print CSV rows");
    cmd->add_option("--cache", cache_dir, "Directory for cached exploration sequences");
  };

  std::string scenario_file;
  auto* run_cmd = app.add_subcommand("run", "Run one scenario file");
  run_cmd->add_option("scenario", scenario_file, "Scenario file")->required()->check(CLI::ExistingFile);
  add_common(run_cmd);

  std::string matrix_file;
  auto* suite_cmd = app.add_subcommand("suite", "Run every scenario of a matrix file");
  suite_cmd->add_option("matrix", matrix_file, "Matrix file")->required()->check(CLI::ExistingFile);
  add_common(suite_cmd);

  std::size_t certify_n = 0;
  std::uint64_t certify_seed = 1;
  auto* certify_cmd = app.add_subcommand("certify", "Build and certify EXPLO(N)");
  certify_cmd->add_option("--n", certify_n, "Largest graph size N")->required()->check(CLI::PositiveNumber);
  certify_cmd->add_option("--seed", certify_seed, "Construction seed");
  certify_cmd->add_option("--out", out_dir, "Directory for the sequence cache file");

  std::string trace_file;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a trace file and compare byte for byte");
  replay_cmd->add_option("trace", trace_file, "Trace file written by run --out")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    SequenceCache cache(cache_dir.empty() ? std::nullopt : std::optional<fs::path>(cache_dir));
    RunOptions opts;
    opts.cap_override = cap;

    if (*run_cmd) {
      ScenarioConfig c = load_scenario(scenario_file);
      if (cap) c.cap = *cap;  // recorded in the trace header so replay matches
      opts.cap_override.reset();
      opts.keep_records = !out_dir.empty();
      const ScenarioResult r = run_scenario(c, cache, opts);
      print_verdict(std::cout, r);
      if (csv) std::cout << csv_header() << '\n' << csv_row(r) << '\n';
      if (!out_dir.empty()) {
        auto trace = open_out(out_dir, r.config.id() + ".trace");
        write_trace_file(trace, r);
        auto verdict = open_out(out_dir, r.config.id() + ".verdict");
        print_verdict(verdict, r);
        auto rows = open_out(out_dir, r.config.id() + ".csv");
        rows << csv_header() << '\n' << csv_row(r) << '\n';
      }
      return r.pass ? 0 : 1;
    }

    if (*suite_cmd) {
      const auto scenarios = expand(load_matrix(matrix_file));
      const SuiteReport report = run_suite(scenarios, cache, opts, [](std::size_t done, std::size_t total,
                                                                        const ScenarioResult& r) {
        std::cerr << '[' << done << '/' << total << "] " << r.config.id() << (r.pass ? " ok" : " FAIL") << '\n';
      });
      write_summary(std::cout, report);
      if (csv) {
        std::cout << csv_header() << '\n';
        for (const auto& r : report.results) std::cout << csv_row(r) << '\n';
      }
      if (!out_dir.empty()) {
        auto rows = open_out(out_dir, "results.csv");
        rows << csv_header() << '\n';
        for (const auto& r : report.results) rows << csv_row(r) << '\n';
        auto summary = open_out(out_dir, "summary.txt");
        write_summary(summary, report);
      }
      return report.failed == 0 ? 0 : 1;
    }

    if (*certify_cmd) {
      const auto graphs = benchmark_graphs(certify_n);
      const auto seq = build_sequence(certify_n, certify_seed, graphs);
      std::size_t failures = 0;
      for (const auto& g : graphs)
        if (!certify(seq, g).pass) ++failures;
      std::cout << "N: " << certify_n << "\nseed: " << certify_seed << "\nX_N: " << x_n(seq)
                << "\nbenchmark graphs: " << graphs.size() << "\nfailures: " << failures << '\n';
      if (!out_dir.empty()) {
        auto out = open_out(out_dir, "explo_N" + std::to_string(certify_n) + "_seed" +
                                         std::to_string(certify_seed) + ".txt");
        write_sequence(out, seq);
      }
      return failures == 0 ? 0 : 1;
    }

    if (*replay_cmd) {
      std::ifstream in(trace_file);
      std::stringstream original;
      original << in.rdbuf();
      std::istringstream lines(original.str());
      std::string header, line;
      while (std::getline(lines, line) && line.rfind("# ", 0) == 0) {
        const std::string body = line.substr(2);
        if (body.rfind("X_N", 0) == 0 || body.rfind("digest", 0) == 0) continue;
        header += body + '\n';
      }
      std::istringstream hs(header);
      const ScenarioConfig c = parse_scenario(hs);
      opts.keep_records = true;
      const ScenarioResult r = run_scenario(c, cache, opts);
      const std::string replayed = trace_text(r);
      const bool same = replayed == original.str();
      std::cout << "scenario: " << c.id() << "\nreplay: " << (same ? "identical" : "DIFFERS") << '\n';
      return same ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
