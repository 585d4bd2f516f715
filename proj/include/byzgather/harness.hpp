#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "byzgather/exploration.hpp"
#include "byzgather/scenario.hpp"
#include "byzgather/simcore.hpp"

namespace byzgather {

/// Certified sequences keyed by (N, seed). Optionally persisted as text
/// files in a directory so later runs skip construction.
class SequenceCache {
 public:
  explicit SequenceCache(std::optional<std::filesystem::path> dir = std::nullopt) : dir_(std::move(dir)) {}
  /// If `scenario_graph` is not covered by the registered benchmark
  /// sequence, a sequence certified for the benchmark set plus that graph is built.
  std::shared_ptr<const ExplorationSequence> get(std::size_t max_nodes, std::uint64_t seed,
                                                 const PortGraph* scenario_graph = nullptr);

 private:
  std::optional<std::filesystem::path> dir_;
  std::mutex mutex_;
  std::vector<std::tuple<std::size_t, std::uint64_t, PortGraph, std::shared_ptr<const ExplorationSequence>>> extended_;
  std::map<std::pair<std::size_t, std::uint64_t>, std::shared_ptr<const ExplorationSequence>> memo_;
};

struct Metrics {
  Round elapsed = 0;  // rounds from the first good wake to the last good termination, inclusive
  Round slack = 0;    // bound - elapsed
  Round first_group_round = 0;  // 0: no good agent joined a group
  int mgst_phases = 0;          // most MakeGroup phases any good agent started
  std::size_t max_blacklist = 0;
  std::size_t byzantine_blacklisted = 0;  // (good agent, Byzantine id) blacklist entries at the end
  Round wake_spread = 0;       // latest minus earliest good wake round
  std::optional<AgentId> max_idm;  // largest idm held by a good agent (SIM)
};

struct Verdict {
  bool gathered = false;
  bool same_node = false;
  bool same_round = false;
  Round last_termination_round = 0;
  Round first_good_wake = 0;
  Round bound_ns = 0;
  Round bound_sim = 0;
  bool bound_satisfied = false;
  std::map<std::string, bool> lemma_checks;
  std::vector<std::string> notes;
  Metrics metrics;

  bool lemmas_pass() const;
  bool pass(Variant v) const;
};

/// Observer that evaluates the per-step lemma properties during a run.
class LemmaChecker : public RoundObserver {
 public:
  LemmaChecker(std::size_t x, std::size_t f, const std::vector<AgentSpec>& agents);

  void on_step(const World& world, std::size_t agent, const StepDigest& before, const AgentState& after,
               const ObservationView& view) override;
  void on_round_end(const World& world) override;

  /// Adds the end-of-run checks and copies results and metrics into the verdict.
  void finish(const Trace& trace, Verdict& v);

  const std::map<std::string, bool>& results() const noexcept { return ok_; }

 private:
  void fail(const std::string& lemma, const std::string& note);

  std::int64_t x_;
  std::int64_t phase_;
  std::size_t f_;
  std::vector<AgentSpec> agents_;
  IdSet good_ids_;
  AgentId max_id_ = 0;
  AgentId a_min_ = 0;

  std::map<std::string, bool> ok_;
  std::vector<std::string> notes_;

  std::vector<std::optional<Round>> end_ci_round_;
  std::vector<std::optional<int>> estf_;
  std::vector<std::optional<Role>> first_role_;
  std::vector<int> mgst_phases_;
  std::vector<std::size_t> max_bl_;
  std::vector<std::size_t> byz_bl_;
  std::vector<std::optional<AgentId>> idm_;
  Round first_group_round_ = 0;

  struct Joined {
    std::size_t agent;
    AgentId gid;
    std::optional<int> gef;
  };
  std::vector<Joined> joined_this_round_;
  std::vector<char> consensus_active_;  // per agent, this round
  std::vector<char> ungrouped_before_;
};

struct RunOptions {
  bool keep_records = false;
  std::optional<Round> cap_override;
};

struct ScenarioResult {
  ScenarioConfig config;
  std::size_t x = 0;
  ResolvedAgents agents;
  Trace trace;
  Verdict verdict;
  bool pass = false;
};

ScenarioResult run_scenario(const ScenarioConfig& c, SequenceCache& cache, const RunOptions& opts = {});

/// Re-evaluates a finished trace; also used by run_scenario.
Verdict check(const Trace& trace, const ScenarioConfig& c, std::size_t x, const ResolvedAgents& agents);

/// Header: scenario,variant,n,N,k,f,strategy,wake,X_N,rounds,bound,pass
std::string csv_header();
std::string csv_row(const ScenarioResult& r);

/// Trace file: scenario fields as "# " lines, then "# digest = ..", then records.
void write_trace_file(std::ostream& out, const ScenarioResult& r);

struct SuiteReport {
  std::vector<ScenarioResult> results;  // sorted by scenario id
  std::size_t passed = 0;
  std::size_t failed = 0;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total, const ScenarioResult&)>;

SuiteReport run_suite(const std::vector<ScenarioConfig>& scenarios, SequenceCache& cache,
                      const RunOptions& opts = {}, const ProgressFn& progress = {});

void write_summary(std::ostream& out, const SuiteReport& report);

}  // namespace byzgather
