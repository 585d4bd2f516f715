#include "byzgather/harness.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "byzgather/rng.hpp"

namespace byzgather {

std::shared_ptr<const ExplorationSequence> SequenceCache::get(std::size_t max_nodes, std::uint64_t seed,
                                                              const PortGraph* scenario_graph) {
  std::lock_guard lock(mutex_);
  auto& base = memo_[{max_nodes, seed}];
  if (!base) {
    const auto file = dir_ ? std::optional(*dir_ / ("explo_N" + std::to_string(max_nodes) + "_seed" +
                                                     std::to_string(seed) + ".txt"))
                           : std::nullopt;
    if (file && std::filesystem::exists(*file)) {
      std::ifstream in(*file);
      auto seq = read_sequence(in);
      if (seq.certified_bound == max_nodes && seq.seed == seed)
        base = std::make_shared<const ExplorationSequence>(std::move(seq));
    }
    if (!base) {
      const auto graphs = benchmark_graphs(max_nodes);
      base = std::make_shared<const ExplorationSequence>(build_sequence(max_nodes, seed, graphs));
      if (file) {
        std::filesystem::create_directories(*dir_);
        std::ofstream out(*file);
        write_sequence(out, *base);
      }
    }
  }
  if (!scenario_graph || certify(*base, *scenario_graph).pass) return base;

  for (const auto& [n, s, g, seq] : extended_)
    if (n == max_nodes && s == seed && g == *scenario_graph) return seq;
  auto graphs = benchmark_graphs(max_nodes);
  graphs.push_back(*scenario_graph);
  auto seq = std::make_shared<const ExplorationSequence>(build_sequence(max_nodes, seed, graphs));
  extended_.emplace_back(max_nodes, seed, *scenario_graph, seq);
  return seq;
}

bool Verdict::lemmas_pass() const {
  return std::all_of(lemma_checks.begin(), lemma_checks.end(), [](const auto& kv) { return kv.second; });
}

bool Verdict::pass(Variant v) const {
  return gathered && same_node && (v == Variant::NonSimultaneous || same_round) && bound_satisfied &&
         lemmas_pass();
}

namespace {

const char* const kLemmaNames[] = {"lemma2", "lemma3", "lemma4", "lemma5", "lemma6", "lemma8", "lemma9",
                                   "tar_monotone", "gst_freeze", "flag_monotone", "idm_bound"};

std::string fmt_opt(const std::optional<AgentId>& v) { return v ? std::to_string(*v) : "null"; }

}  // namespace

LemmaChecker::LemmaChecker(std::size_t x, std::size_t f, const std::vector<AgentSpec>& agents)
    : x_(static_cast<std::int64_t>(x)), phase_(3 * static_cast<std::int64_t>(x) + 1), f_(f), agents_(agents) {
  for (const auto& a : agents) {
    max_id_ = std::max(max_id_, a.id);
    if (!a.byzantine) insert_id(good_ids_, a.id);
  }
  if (!good_ids_.empty()) a_min_ = good_ids_.front();
  for (const char* name : kLemmaNames) ok_[name] = true;
  const std::size_t k = agents.size();
  end_ci_round_.resize(k);
  estf_.resize(k);
  first_role_.resize(k);
  mgst_phases_.resize(k);
  max_bl_.resize(k);
  byz_bl_.resize(k);
  idm_.resize(k);
  consensus_active_.resize(k);
  ungrouped_before_.resize(k);
}

void LemmaChecker::fail(const std::string& lemma, const std::string& note) {
  auto& flag = ok_[lemma];
  if (flag && notes_.size() < 20) notes_.push_back(lemma + ": " + note);
  flag = false;
}

void LemmaChecker::on_step(const World& world, std::size_t i, const StepDigest& before, const AgentState& after,
                           const ObservationView& view) {
  const Round r = world.round;
  const auto who = [&] { return "agent " + std::to_string(after.id) + " round " + std::to_string(r); };

  if (!before.end_ci && after.end_ci) {
    end_ci_round_[i] = r;
    estf_[i] = after.estf;
    for (AgentId g : good_ids_)
      if (!contains(after.ids(), g)) {
        fail("lemma2", who() + " ended CollectID without good id " + std::to_string(g));
        break;
      }
    const int e = after.estf.value_or(-1);
    if (e < static_cast<int>(f_)) fail("lemma3", who() + " estf=" + std::to_string(e) + " < f=" + std::to_string(f_));
    const auto need = static_cast<std::size_t>(4 * e + 4) * static_cast<std::size_t>(e + 1);
    if (e >= 0 && agents_.size() < need)
      fail("lemma3", who() + " k=" + std::to_string(agents_.size()) + " < (4estf+4)(estf+1)");
  }

  if (!first_role_[i] && (after.sta == Role::MgTarget || after.sta == Role::MgSearch)) first_role_[i] = after.sta;
  if (after.stage == Stage::MakeGroup && before.stage != Stage::MakeGroup) ++mgst_phases_[i];

  if (after.bl.size() != before.bl_size) {
    max_bl_[i] = std::max(max_bl_[i], after.bl.size());
    byz_bl_[i] = static_cast<std::size_t>(
        std::count_if(after.bl.begin(), after.bl.end(), [&](AgentId b) { return !contains(good_ids_, b); }));
    for (AgentId b : after.bl)
      if (contains(good_ids_, b)) {
        fail("lemma6", who() + " blacklisted good id " + std::to_string(b));
        break;
      }
  }

  if (before.sta == Role::MgSearch && after.sta == Role::MgSearch && before.tar && after.tar &&
      *after.tar < *before.tar)
    fail("tar_monotone", who() + " tar " + fmt_opt(before.tar) + " -> " + fmt_opt(after.tar));

  if (before.stage == Stage::Gather && after.stage == Stage::Gather) {
    if (before.end_ci != after.end_ci || before.x != after.x || before.estf != after.estf ||
        before.tar != after.tar || before.gef != after.gef || before.gid != after.gid ||
        before.bl_size != after.bl.size() || before.il_size != after.ids().size() || before.sta != after.sta)
      fail("gst_freeze", who() + " changed CollectID/MakeGroup variables during Gather");
  }

  if (before.flag_t && !after.sim.flag_t) fail("flag_monotone", who() + " cleared flag_t");
  if (after.sim.idm) {
    idm_[i] = after.sim.idm;
    if (*after.sim.idm > max_id_)
      fail("idm_bound", who() + " idm=" + std::to_string(*after.sim.idm) + " exceeds the largest real id " +
                            std::to_string(max_id_));
  }

  ungrouped_before_[i] = !before.gid;
  consensus_active_[i] = before.stage == Stage::MakeGroup && !before.gid &&
                         (before.sta == Role::MgTarget || (before.sta == Role::MgSearch && after.pc.found));
  if (!before.gid && after.gid) {
    joined_this_round_.push_back({i, *after.gid, after.gef});
    if (first_group_round_ == 0) first_group_round_ = r;
  }
  (void)view;
}

void LemmaChecker::on_round_end(const World& world) {
  for (const auto& j : joined_this_round_) {
    const NodeIndex v = world.position[j.agent];
    const int gef = j.gef.value_or(0);
    std::size_t gc = 0;
    for (std::size_t m = 0; m < world.size(); ++m) {
      if (world.position[m] != v) continue;
      const PresentedState& p = world.presented[m];
      if (p.stage != Stage::MakeGroup || p.tar != std::optional<AgentId>(j.gid)) continue;
      ++gc;
      if (world.agents[m].byzantine || world.status[m] != AgentStatus::Active) continue;
      if (!ungrouped_before_[m] || !consensus_active_[m]) continue;
      const bool agrees = std::any_of(joined_this_round_.begin(), joined_this_round_.end(), [&](const Joined& o) {
        return o.agent == m && o.gid == j.gid && o.gef == j.gef;
      });
      if (!agrees)
        fail("lemma8", "round " + std::to_string(world.round) + ": agent " + std::to_string(world.agents[m].id) +
                           " did not join group " + std::to_string(j.gid) + " with agent " +
                           std::to_string(world.agents[j.agent].id));
    }
    if (gc < static_cast<std::size_t>(4 * gef + 4))
      fail("lemma8", "round " + std::to_string(world.round) + ": group " + std::to_string(j.gid) + " formed with " +
                         std::to_string(gc) + " candidates, gef=" + std::to_string(gef));
  }
  joined_this_round_.clear();
}

void LemmaChecker::finish(const Trace& trace, Verdict& v) {
  // Lemma 4: pairwise estf spread
  std::optional<int> lo, hi;
  for (std::size_t i = 0; i < agents_.size(); ++i)
    if (!agents_[i].byzantine && estf_[i]) {
      lo = lo ? std::min(*lo, *estf_[i]) : *estf_[i];
      hi = hi ? std::max(*hi, *estf_[i]) : *estf_[i];
    }
  if (lo && *hi - *lo > 1)
    fail("lemma4", "good estf values range over [" + std::to_string(*lo) + "," + std::to_string(*hi) + "]");

  // Lemma 5: a_min is a target; at most EFM+1 good targets
  std::size_t targets = 0;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    if (agents_[i].byzantine || !first_role_[i]) continue;
    if (*first_role_[i] == Role::MgTarget) ++targets;
    if (agents_[i].id == a_min_ && *first_role_[i] != Role::MgTarget)
      fail("lemma5", "smallest good id " + std::to_string(a_min_) + " became a searcher");
  }
  if (hi && targets > static_cast<std::size_t>(*hi) + 1)
    fail("lemma5", std::to_string(targets) + " good targets exceed EFM+1=" + std::to_string(*hi + 1));

  // Lemma 9: a group exists by the end of a_last's (f+1)-th MakeGroup phase
  std::optional<Round> last_end_ci;
  bool all_finished_ci = true;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    if (agents_[i].byzantine) continue;
    if (!end_ci_round_[i]) all_finished_ci = false;
    else last_end_ci = std::max(last_end_ci.value_or(0), *end_ci_round_[i]);
  }
  if (all_finished_ci && last_end_ci) {
    const Round deadline = *last_end_ci + 3 * phase_ * static_cast<Round>(f_ + 1);
    if (first_group_round_ == 0 ? trace.rounds_executed >= deadline : first_group_round_ > deadline)
      fail("lemma9", "first group round " + std::to_string(first_group_round_) + " misses deadline " +
                         std::to_string(deadline));
  }

  for (const auto& [k, ok] : ok_) v.lemma_checks[k] = ok;
  v.notes.insert(v.notes.end(), notes_.begin(), notes_.end());
  v.metrics.first_group_round = first_group_round_;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    if (agents_[i].byzantine) continue;
    v.metrics.mgst_phases = std::max(v.metrics.mgst_phases, mgst_phases_[i]);
    v.metrics.max_blacklist = std::max(v.metrics.max_blacklist, max_bl_[i]);
    v.metrics.byzantine_blacklisted += byz_bl_[i];
    if (idm_[i]) v.metrics.max_idm = std::max(v.metrics.max_idm.value_or(0), *idm_[i]);
  }
}

Verdict check(const Trace& trace, const ScenarioConfig& c, std::size_t x, const ResolvedAgents& agents) {
  Verdict v;
  v.bound_ns = theorem1_bound(x, c.f, agents.lambda_good);
  v.bound_sim = theorem2_bound(x, c.f, agents.lambda_all);

  bool all_terminated = true;
  std::optional<NodeIndex> node;
  std::optional<Round> first_wake, last_wake, first_term, last_term;
  v.same_node = true;
  for (const auto& a : trace.agents) {
    if (a.byzantine) continue;
    if (a.wake_round) {
      first_wake = std::min(first_wake.value_or(*a.wake_round), *a.wake_round);
      last_wake = std::max(last_wake.value_or(*a.wake_round), *a.wake_round);
    }
    if (!a.termination_round) {
      all_terminated = false;
    } else {
      first_term = std::min(first_term.value_or(*a.termination_round), *a.termination_round);
      last_term = std::max(last_term.value_or(*a.termination_round), *a.termination_round);
    }
    if (node && *node != a.final_node) v.same_node = false;
    node = a.final_node;
  }
  v.gathered = all_terminated && v.same_node;
  v.same_round = all_terminated && first_term == last_term;
  v.first_good_wake = first_wake.value_or(0);
  v.last_termination_round = last_term.value_or(0);
  const Round bound = c.variant == Variant::NonSimultaneous ? v.bound_ns : v.bound_sim;
  v.metrics.elapsed = all_terminated ? v.last_termination_round - v.first_good_wake + 1 : trace.rounds_executed;
  v.metrics.slack = bound - v.metrics.elapsed;
  v.bound_satisfied = all_terminated && v.metrics.elapsed <= bound;
  v.metrics.wake_spread = first_wake && last_wake ? *last_wake - *first_wake : 0;
  v.lemma_checks["wake_spread"] = v.metrics.wake_spread <= static_cast<Round>(x);

  if (trace.capped) v.notes.push_back("RoundCapExceeded after " + std::to_string(trace.rounds_executed) + " rounds");
  if (all_terminated && !v.same_node) v.notes.push_back("good agents terminated on different nodes");
  if (c.variant == Variant::Simultaneous && all_terminated && !v.same_round)
    v.notes.push_back("good agents terminated in different rounds");
  if (all_terminated && !v.bound_satisfied)
    v.notes.push_back("elapsed " + std::to_string(v.metrics.elapsed) + " exceeds bound " + std::to_string(bound));
  return v;
}

ScenarioResult run_scenario(const ScenarioConfig& c, SequenceCache& cache, const RunOptions& opts) {
  validate(c);
  ScenarioResult res;
  res.config = c;
  const PortGraph graph = generate({c.family, c.n, c.graph_seed});
  const auto seq = cache.get(c.bound_n(), c.explo_seed, &graph);
  res.x = seq->length();
  res.agents = resolve_agents(c, res.x);

  EngineSetup setup;
  setup.graph = &graph;
  setup.protocol = std::make_shared<const Protocol>(seq, c.variant);
  setup.agents = res.agents.agents;
  setup.keep_records = opts.keep_records;
  setup.cap = opts.cap_override   ? *opts.cap_override
              : c.cap > 0         ? c.cap
                                  : 4 * theorem2_bound(res.x, c.f, res.agents.lambda_all);
  for (const auto& a : setup.agents)
    setup.strategies.push_back(a.byzantine ? make_strategy(c.strategy, mix_seed(c.strategy_seed, a.id)) : nullptr);

  LemmaChecker checker(res.x, c.f, setup.agents);
  res.trace = run(setup, &checker);
  res.verdict = check(res.trace, c, res.x, res.agents);
  checker.finish(res.trace, res.verdict);
  res.pass = res.verdict.pass(c.variant);
  return res;
}

std::string csv_header() { return "scenario,variant,n,N,k,f,strategy,wake,X_N,rounds,bound,pass"; }

std::string csv_row(const ScenarioResult& r) {
  const auto& c = r.config;
  std::ostringstream os;
  os << c.id() << ',' << to_string(c.variant) << ',' << c.n << ',' << c.bound_n() << ',' << c.team_size() << ','
     << c.f << ',' << to_string(c.strategy) << ',' << to_string(c.wake) << ',' << r.x << ','
     << r.verdict.metrics.elapsed << ','
     << (c.variant == Variant::NonSimultaneous ? r.verdict.bound_ns : r.verdict.bound_sim) << ','
     << (r.pass ? "true" : "false");
  return os.str();
}

void write_trace_file(std::ostream& out, const ScenarioResult& r) {
  write_scenario(out, r.config, "# ");
  out << "# X_N = " << r.x << '\n';
  out << "# digest = " << r.trace.digest << '\n';
  write_records(out, r.trace);
}

SuiteReport run_suite(const std::vector<ScenarioConfig>& scenarios, SequenceCache& cache, const RunOptions& opts,
                      const ProgressFn& progress) {
  SuiteReport report;
  report.results.resize(scenarios.size());
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), scenarios.size()));
  std::mutex mu;
  std::size_t next = 0, done = 0;
  auto work = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(mu);
        if (next == scenarios.size()) return;
        i = next++;
      }
      ScenarioResult res = run_scenario(scenarios[i], cache, opts);
      std::lock_guard lock(mu);
      report.results[i] = std::move(res);
      ++done;
      if (progress) progress(done, scenarios.size(), report.results[i]);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  std::stable_sort(report.results.begin(), report.results.end(),
                   [](const ScenarioResult& a, const ScenarioResult& b) { return a.config.id() < b.config.id(); });
  for (const auto& r : report.results) (r.pass ? report.passed : report.failed)++;
  return report;
}

void write_summary(std::ostream& out, const SuiteReport& report) {
  out << "scenarios: " << report.results.size() << ", passed: " << report.passed << ", failed: " << report.failed
      << '\n';
  for (const auto& r : report.results) {
    if (r.pass) continue;
    out << "FAIL " << r.config.id() << '\n';
    for (const auto& note : r.verdict.notes) out << "  " << note << '\n';
  }
}

}  // namespace byzgather
