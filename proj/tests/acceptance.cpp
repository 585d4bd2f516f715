// Acceptance suite: one pass/fail line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "byzgather/harness.hpp"
#include "byzgather/simgather.hpp"

namespace fs = std::filesystem;
using namespace byzgather;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Line {
  int number;
  std::string title;
  bool pass;
  std::string detail;
};

std::vector<Line> lines;

void report(int number, const std::string& title, bool pass, const std::string& detail) {
  lines.push_back({number, title, pass, detail});
  std::cout << "criterion " << number << " [" << title << "]: " << (pass ? "PASS" : "FAIL") << "  " << detail
            << std::endl;
}

// Walk oracle independent of the library's cover routine.
bool walk_visits_all(const ExplorationSequence& seq, const PortGraph& g, NodeIndex start) {
  std::vector<char> seen(g.node_count(), 0);
  seen[start] = 1;
  NodeIndex v = start;
  Port entry = kStartPort;
  for (std::size_t i = 0; i < seq.length(); ++i) {
    if (g.degree(v) == 0) break;
    const PortEnd next = g.neighbor(v, explo_step(seq, i, entry, g.degree(v)));
    v = next.node;
    entry = next.port;
    seen[v] = 1;
  }
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

// Criterion 1 -----------------------------------------------------------------

void exploration_certification(SequenceCache& cache) {
  const auto t0 = Clock::now();
  std::size_t walks = 0, failures = 0;
  std::ostringstream xs;
  for (std::size_t N = 3; N <= 10; ++N) {
    const auto seq = cache.get(N, 1);
    xs << (N > 3 ? " " : "") << "X_" << N << "=" << seq->length();
    for (FamilyKind kind : kAllFamilies)
      for (std::size_t n = 3; n <= N; ++n)
        for (std::uint64_t s = 1; s <= 3; ++s) {
          const PortGraph g = generate({kind, n, s});
          if (!certify(*seq, g).pass) ++failures;
          for (NodeIndex v = 0; v < g.node_count(); ++v, ++walks)
            if (!walk_visits_all(*seq, g, v)) ++failures;
        }
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << walks << " walks, " << failures << " uncovered, " << secs << " s (target < 30 s); " << xs.str();
  report(1, "exploration certification", failures == 0 && secs < 30.0, d.str());
}

// Criteria 2-5 and 7 share one matrix run ---------------------------------------

struct MatrixRun {
  std::vector<ScenarioResult> ns, sim;
  double ns_seconds = 0, sim_seconds = 0;
};

void write_csv(const fs::path& path, const std::vector<ScenarioResult>& rs) {
  std::ofstream out(path);
  out << csv_header() << '\n';
  for (const auto& r : rs) out << csv_row(r) << '\n';
}

MatrixRun run_matrix(SequenceCache& cache, const fs::path& out_dir) {
  const auto all = expand(load_matrix(fs::path(BYZGATHER_SOURCE_DIR) / "scenarios" / "acceptance.matrix"));
  std::vector<ScenarioConfig> ns, sim;
  for (const auto& c : all) (c.variant == Variant::NonSimultaneous ? ns : sim).push_back(c);
  MatrixRun m;
  auto t0 = Clock::now();
  m.ns = run_suite(ns, cache).results;
  m.ns_seconds = seconds_since(t0);
  t0 = Clock::now();
  m.sim = run_suite(sim, cache).results;
  m.sim_seconds = seconds_since(t0);
  write_csv(out_dir / "matrix_ns.csv", m.ns);
  write_csv(out_dir / "matrix_sim.csv", m.sim);
  return m;
}

std::string breakdown_by_wake(const std::vector<const ScenarioResult*>& failed) {
  std::map<std::string, std::size_t> by;
  for (const auto* r : failed) ++by[std::string(to_string(r->config.wake)) + "/f" + std::to_string(r->config.f)];
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : by) {
    os << (first ? "" : ", ") << k << ":" << v;
    first = false;
  }
  return os.str();
}

void gathering_criterion(int number, const std::string& title, const std::vector<ScenarioResult>& rs,
                         double secs, double target_secs) {
  std::vector<const ScenarioResult*> failed;
  Round worst_overrun = 0;
  std::size_t within_extra_x = 0;
  for (const auto& r : rs) {
    const auto& v = r.verdict;
    const bool sim = r.config.variant == Variant::Simultaneous;
    const bool ok = v.gathered && v.same_node && (!sim || v.same_round) && v.bound_satisfied;
    if (ok) continue;
    failed.push_back(&r);
    if (v.gathered && v.same_node && (!sim || v.same_round)) {
      worst_overrun = std::max(worst_overrun, -v.metrics.slack);
      if (-v.metrics.slack <= static_cast<Round>(r.x)) ++within_extra_x;
    }
  }
  std::ostringstream d;
  d << rs.size() - failed.size() << "/" << rs.size() << " within bound, " << secs << " s (target < " << target_secs
    << " s)";
  if (!failed.empty()) {
    d << "; failures by wake/f: " << breakdown_by_wake(failed) << "; largest overrun " << worst_overrun
      << " rounds; " << within_extra_x << "/" << failed.size() << " fit the bound plus X_N";
  }
  report(number, title, failed.empty() && secs < target_secs, d.str());
}

void lemma_criterion(const MatrixRun& m) {
  std::map<std::string, std::size_t> failures;
  std::size_t traces = 0;
  std::string first_note;
  for (const auto* rs : {&m.ns, &m.sim})
    for (const auto& r : *rs) {
      ++traces;
      for (const auto& [name, ok] : r.verdict.lemma_checks)
        if (!ok) {
          ++failures[name];
          if (first_note.empty()) first_note = r.config.id();
        }
    }
  std::ostringstream d;
  d << traces << " traces; checks:";
  bool any = false;
  std::set<std::string> names;
  for (const auto* rs : {&m.ns, &m.sim})
    for (const auto& r : *rs)
      for (const auto& kv : r.verdict.lemma_checks) names.insert(kv.first);
  for (const auto& n : names) {
    d << ' ' << n << '=' << failures[n];
    any = any || failures[n] > 0;
  }
  d << " failing";
  if (any) d << "; first failing scenario " << first_note;
  report(4, "lemma suites", !any && traces > 0, d.str());
}

void adversary_criterion(const MatrixRun& m) {
  std::size_t lure_runs = 0, lure_blacklisting = 0;
  for (const auto* rs : {&m.ns, &m.sim})
    for (const auto& r : *rs)
      if (r.config.strategy == StrategyKind::Lure && r.config.f > 0) {
        ++lure_runs;
        if (r.verdict.metrics.byzantine_blacklisted > 0) ++lure_blacklisting;
      }
  std::size_t inflator_runs = 0, inflated = 0;
  AgentId largest_idm = 0;
  for (const auto& r : m.sim) {
    if (r.config.strategy != StrategyKind::IdInflator || r.config.f == 0) continue;
    ++inflator_runs;
    if (r.verdict.metrics.max_idm) {
      largest_idm = std::max(largest_idm, *r.verdict.metrics.max_idm);
      if (*r.verdict.metrics.max_idm > r.agents.lambda_all) ++inflated;
    }
  }
  std::ostringstream d;
  d << "lure blacklisted in " << lure_blacklisting << "/" << lure_runs << " runs; id_inflator raised idm above the "
    << "largest real id in " << inflated << "/" << inflator_runs << " SIM runs (largest idm seen " << largest_idm
    << ")";
  report(5, "adversary effectiveness", lure_blacklisting > 0 && inflated == 0 && inflator_runs > 0, d.str());
}

// Criterion 6 -----------------------------------------------------------------

void baseline_criterion(SequenceCache& cache) {
  std::vector<ScenarioConfig> configs;
  for (FamilyKind kind : kAllFamilies)
    for (std::size_t n = 3; n <= 10; ++n)
      for (std::uint64_t s = 1; s <= 3; ++s)
        for (WakePolicy w : kAllWakePolicies) {
          ScenarioConfig c;
          c.family = kind;
          c.n = c.max_nodes = n;
          c.f = 0;
          c.k = 4;
          c.wake = w;
          c.seed = c.graph_seed = c.wake_seed = c.strategy_seed = s;
          c.name = "baseline-" + std::string(to_string(kind)) + "-n" + std::to_string(n) + "-s" + std::to_string(s) +
                   "-" + std::string(to_string(w));
          configs.push_back(c);
        }
  const auto t0 = Clock::now();
  const auto rs = run_suite(configs, cache).results;
  std::vector<const ScenarioResult*> failed;
  std::map<std::string, std::pair<std::size_t, std::size_t>> by_wake;
  Round worst = 0;
  std::size_t within_extra_x = 0;
  for (const auto& r : rs) {
    auto& [ok_count, total] = by_wake[std::string(to_string(r.config.wake))];
    ++total;
    if (r.pass) {
      ++ok_count;
      continue;
    }
    failed.push_back(&r);
    if (r.verdict.gathered) {
      worst = std::max(worst, -r.verdict.metrics.slack);
      if (-r.verdict.metrics.slack <= static_cast<Round>(r.x)) ++within_extra_x;
    }
  }
  std::ostringstream d;
  d << rs.size() - failed.size() << "/" << rs.size() << " pass (";
  bool first = true;
  for (const auto& [w, c] : by_wake) {
    d << (first ? "" : ", ") << w << " " << c.first << "/" << c.second;
    first = false;
  }
  d << "), " << seconds_since(t0) << " s";
  if (!failed.empty())
    d << "; largest overrun " << worst << " rounds; " << within_extra_x << "/" << failed.size()
      << " fit the bound plus X_N";
  report(6, "f = 0 baseline", failed.empty(), d.str());
}

// Criterion 7 -----------------------------------------------------------------

void determinism_criterion(const MatrixRun& m, SequenceCache& cache) {
  std::size_t checked = 0, mismatched = 0;
  for (const auto* rs : {&m.ns, &m.sim})
    for (std::size_t i = 0; i < rs->size(); i += 53) {
      const auto& base = (*rs)[i];
      RunOptions opts;
      opts.keep_records = true;
      const auto a = run_scenario(base.config, cache, opts);
      const auto b = run_scenario(base.config, cache, opts);
      std::ostringstream ta, tb;
      write_trace_file(ta, a);
      write_trace_file(tb, b);
      ++checked;
      if (ta.str() != tb.str() || csv_row(a) != csv_row(b) || csv_row(a) != csv_row(base) ||
          a.trace.digest != base.trace.digest)
        ++mismatched;
    }
  std::ostringstream d;
  d << checked << " sampled scenarios re-run twice with full traces, " << mismatched << " mismatched";
  report(7, "determinism", mismatched == 0 && checked > 0, d.str());
}

// Criterion 8 -----------------------------------------------------------------

void formula_criterion() {
  std::vector<std::string> wrong;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) wrong.push_back(what);
  };
  expect(estimate_f(16) == 1, "estimate_f(16)");
  expect(estimate_f(36) == 2, "estimate_f(36)");
  expect(estimate_f(17) == 1, "estimate_f(17)");
  const int id1[] = {1, 0, 1, 1, 1, 0, 1, 1};
  for (int x = 1; x <= 8; ++x)
    expect(extended_label_bit(1, x) == id1[x - 1], "extended_label_bit(1," + std::to_string(x) + ")");
  expect(extended_label_bit(2, 5) == 0, "extended_label_bit(2,5)");
  expect(cist_length(1) == 6, "cist_length(1)");
  expect(cist_length(8) == 12, "cist_length(8)");
  expect(cist_length(5) == 10, "cist_length(5)");
  expect(cist_length(3) == 8, "cist_length(3)");
  expect(theorem1_bound(10, 1, 8) == 1312, "theorem1_bound(10,1,8)");
  expect(theorem1_bound(1, 0, 1) == 85, "theorem1_bound(1,0,1)");
  expect(theorem2_bound(10, 1, 8) == 1333, "theorem2_bound(10,1,8)");
  expect(theorem2_bound(1, 0, 1) == 88, "theorem2_bound(1,0,1)");
  expect(sim_threshold(10, 8) == 1136, "sim_threshold(10,8)");
  std::ostringstream d;
  d << (wrong.empty() ? "all hand-derived values match" : "mismatches:");
  for (const auto& w : wrong) d << ' ' << w;
  report(8, "unit formulas", wrong.empty(), d.str());
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const fs::path out_dir = "acceptance";
  fs::create_directories(out_dir);
  SequenceCache cache;

  formula_criterion();
  exploration_certification(cache);
  const MatrixRun m = run_matrix(cache, out_dir);
  gathering_criterion(2, "non-simultaneous gathering", m.ns, m.ns_seconds, 300.0);
  gathering_criterion(3, "simultaneous gathering", m.sim, m.sim_seconds, 300.0);
  lemma_criterion(m);
  adversary_criterion(m);
  baseline_criterion(cache);
  determinism_criterion(m, cache);

  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.number < b.number; });
  std::size_t failed = 0;
  std::cout << "\nsummary\n";
  for (const auto& l : lines) {
    std::cout << "  " << l.number << " " << (l.pass ? "PASS" : "FAIL") << "  " << l.title << '\n';
    if (!l.pass) ++failed;
  }
  std::cout << "total runtime " << seconds_since(t0) << " s; per-scenario CSV in " << fs::absolute(out_dir).string()
            << '\n';
  return failed == 0 ? 0 : 1;
}
