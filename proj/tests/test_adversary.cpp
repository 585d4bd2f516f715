#include <doctest.h>

#include <set>

#include "byzgather/harness.hpp"
#include "byzgather/rng.hpp"

using namespace byzgather;

namespace {

std::vector<AgentSpec> team(std::initializer_list<std::pair<AgentId, bool>> members) {
  std::vector<AgentSpec> out;
  for (const auto& [id, byz] : members) out.push_back({id, 0, byz, std::nullopt});
  return out;
}

ScenarioConfig small(StrategyKind s, std::uint64_t seed = 1) {
  ScenarioConfig c;
  c.family = FamilyKind::Ring;
  c.n = 5;
  c.f = 1;
  c.strategy = s;
  c.seed = seed;
  return c;
}

SequenceCache& cache() {
  static SequenceCache c;
  return c;
}

// Runs a scenario through the engine with an extra observer.
Trace observe(const ScenarioConfig& c, RoundObserver& obs) {
  const PortGraph g = generate({c.family, c.n, c.graph_seed});
  const auto seq = cache().get(c.bound_n(), c.explo_seed, &g);
  const auto agents = resolve_agents(c, seq->length());
  EngineSetup setup;
  setup.graph = &g;
  setup.protocol = std::make_shared<const Protocol>(seq, c.variant);
  setup.agents = agents.agents;
  setup.cap = 4 * theorem2_bound(seq->length(), c.f, agents.lambda_all);
  for (const auto& a : setup.agents)
    setup.strategies.push_back(a.byzantine ? make_strategy(c.strategy, mix_seed(c.strategy_seed, a.id)) : nullptr);
  return run(setup, &obs);
}

}  // namespace

TEST_CASE("names round trip") {
  for (StrategyKind k : kAllStrategies) {
    CHECK(parse_strategy(to_string(k)) == k);
    CHECK(make_strategy(k, 3)->kind() == k);
  }
  for (WakePolicy p : kAllWakePolicies) CHECK(parse_wake_policy(to_string(p)) == p);
  CHECK_THROWS(parse_strategy("teleport"));
  CHECK_THROWS(parse_wake_policy("never"));
}

TEST_CASE("wake schedules") {
  const auto agents = team({{4, true}, {9, false}, {2, false}, {30, true}});
  for (const auto& w : wake_schedule(WakePolicy::AllAtOnce, agents, 10, 1)) CHECK(w == 1);

  const auto single = wake_schedule(WakePolicy::SingleGoodFirst, agents, 10, 1);
  CHECK(single[2] == 1);
  CHECK_FALSE(single[0].has_value());
  CHECK_FALSE(single[1].has_value());
  CHECK_FALSE(single[3].has_value());

  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto st = wake_schedule(WakePolicy::AdversarialStagger, agents, 10, seed);
    CHECK(st == wake_schedule(WakePolicy::AdversarialStagger, agents, 10, seed));
    bool good_first = false;
    for (std::size_t i = 0; i < st.size(); ++i) {
      REQUIRE(st[i].has_value());
      CHECK(*st[i] >= 1);
      CHECK(*st[i] <= 21);
      if (!agents[i].byzantine && *st[i] == 1) good_first = true;
    }
    CHECK(good_first);
  }
}

TEST_CASE("invalid wake policies") {
  const auto all_byz = team({{1, true}, {2, true}});
  CHECK_THROWS_AS(wake_schedule(WakePolicy::AllAtOnce, all_byz, 5, 1), InvalidPolicy);
  auto agents = team({{1, true}, {2, false}});
  agents[0].wake_round = 1;
  agents[1].wake_round = 2;
  CHECK_THROWS_AS(validate_schedule(agents), InvalidPolicy);
  agents[1].wake_round = 1;
  CHECK_NOTHROW(validate_schedule(agents));
}

TEST_CASE("crash: searchers blacklist the crashed agent") {
  const auto r = run_scenario(small(StrategyKind::Crash), cache());
  CHECK(r.pass);
  CHECK(r.verdict.metrics.byzantine_blacklisted > 0);
}

TEST_CASE("lure: searchers blacklist the luring agent") {
  std::size_t blacklisted = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto r = run_scenario(small(StrategyKind::Lure, seed), cache());
    CHECK(r.verdict.lemmas_pass());
    blacklisted += r.verdict.metrics.byzantine_blacklisted;
  }
  CHECK(blacklisted > 0);
}

TEST_CASE("fake_group: gid 0 never becomes reliable") {
  struct NoZero : RoundObserver {
    bool zero = false;
    void on_step(const World&, std::size_t, const StepDigest&, const AgentState& after,
                 const ObservationView&) override {
      if (after.pc.gather_gid == AgentId{0}) zero = true;
      if (after.estf && contains(reliable_gids(after.gl, *after.estf), 0)) zero = true;
    }
  };
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    NoZero obs;
    const Trace t = observe(small(StrategyKind::FakeGroup, seed), obs);
    CHECK_FALSE(t.capped);
    CHECK_FALSE(obs.zero);
  }
}

TEST_CASE("mimic_good: gathering still succeeds") {
  for (Variant v : {Variant::NonSimultaneous, Variant::Simultaneous}) {
    auto c = small(StrategyKind::MimicGood);
    c.variant = v;
    CHECK(run_scenario(c, cache()).pass);
  }
}

TEST_CASE("id_inflator: idm never exceeds the largest real id") {
  auto c = small(StrategyKind::IdInflator);
  c.variant = Variant::Simultaneous;
  const auto r = run_scenario(c, cache());
  CHECK(r.pass);
  REQUIRE(r.verdict.metrics.max_idm.has_value());
  CHECK(*r.verdict.metrics.max_idm <= r.agents.lambda_all);
  CHECK(*r.verdict.metrics.max_idm < kInflatedId);
}

TEST_CASE("strategies are deterministic given the seed") {
  for (StrategyKind k : kAllStrategies) {
    const auto a = run_scenario(small(k, 2), cache());
    const auto b = run_scenario(small(k, 2), cache());
    CHECK(a.trace.digest == b.trace.digest);
  }
}
