#include "byzgather/adversary.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "byzgather/rng.hpp"

namespace byzgather {

std::string_view to_string(AgentStatus s) noexcept {
  switch (s) {
    case AgentStatus::Dormant: return "dormant";
    case AgentStatus::Active: return "active";
    case AgentStatus::Terminated: return "terminated";
  }
  return "?";
}

std::string_view to_string(StrategyKind k) noexcept {
  switch (k) {
    case StrategyKind::Crash: return "crash";
    case StrategyKind::RandomWalk: return "random_walk";
    case StrategyKind::FakeTarget: return "fake_target";
    case StrategyKind::Lure: return "lure";
    case StrategyKind::FakeGroup: return "fake_group";
    case StrategyKind::EstfLiar: return "estf_liar";
    case StrategyKind::IdInflator: return "id_inflator";
    case StrategyKind::MimicGood: return "mimic_good";
  }
  return "?";
}

StrategyKind parse_strategy(std::string_view name) {
  for (StrategyKind k : kAllStrategies)
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

std::string_view to_string(WakePolicy p) noexcept {
  switch (p) {
    case WakePolicy::AllAtOnce: return "all_at_once";
    case WakePolicy::SingleGoodFirst: return "single_good_first";
    case WakePolicy::AdversarialStagger: return "adversarial_stagger";
  }
  return "?";
}

WakePolicy parse_wake_policy(std::string_view name) {
  for (WakePolicy p : kAllWakePolicies)
    if (to_string(p) == name) return p;
  throw std::invalid_argument("unknown wake policy '" + std::string(name) + "'");
}

namespace {

IdSetPtr all_ids(const World& world) {
  IdSet ids;
  for (const auto& a : world.agents) insert_id(ids, a.id);
  return std::make_shared<const IdSet>(std::move(ids));
}

Action random_move(Rng& rng, const ObservationView& view) {
  if (view.degree == 0) return Action::stay();
  return Action::move(static_cast<Port>(uniform_below(rng, view.degree)) + 1);
}

class Crash final : public ByzantineStrategy {
 public:
  StrategyKind kind() const noexcept override { return StrategyKind::Crash; }
  void on_wake(const World& world, std::size_t self) override {
    frozen_ = world.protocol->initial_state(world.agents[self].id).present();
  }
  PresentedState present(const World&, std::size_t) override { return frozen_; }
  Action act(const World&, std::size_t, const ObservationView&) override { return Action::stay(); }

 private:
  PresentedState frozen_;
};

class RandomWalk final : public ByzantineStrategy {
 public:
  explicit RandomWalk(std::uint64_t seed) : rng_(seed) {}
  StrategyKind kind() const noexcept override { return StrategyKind::RandomWalk; }
  void on_wake(const World& world, std::size_t self) override {
    IdSet il{world.agents[self].id};
    for (const auto& a : world.agents)
      if (uniform01(rng_) < 0.5) insert_id(il, a.id);
    il_ = std::make_shared<const IdSet>(std::move(il));
  }
  PresentedState present(const World& world, std::size_t self) override {
    static constexpr Stage kStages[] = {Stage::CollectId, Stage::MakeGroup, Stage::Gather};
    static constexpr Role kRoles[] = {Role::CollectId, Role::MgSearch, Role::MgTarget,
                                      Role::GroupExplore, Role::GroupWait};
    const auto pick_id = [&] { return world.agents[uniform_below(rng_, world.size())].id; };
    PresentedState p;
    p.stage = kStages[uniform_below(rng_, 3)];
    p.sta = kRoles[uniform_below(rng_, 5)];
    p.end_ci = p.stage != Stage::CollectId;
    p.estf = static_cast<int>(uniform_below(rng_, world.byzantine_count + 2));
    p.tar = pick_id();
    if (uniform01(rng_) < 0.5) p.gid = pick_id();
    p.gef = p.estf;
    p.flag_t = uniform01(rng_) < 0.5;
    p.il = il_;
    (void)self;
    return p;
  }
  Action act(const World&, std::size_t, const ObservationView& view) override {
    return random_move(rng_, view);
  }

 private:
  Rng rng_;
  IdSetPtr il_;
};

PresentedState target_posture(const World& world, std::size_t self, const IdSetPtr& il) {
  PresentedState p;
  p.stage = Stage::MakeGroup;
  p.sta = Role::MgTarget;
  p.end_ci = true;
  p.estf = static_cast<int>(world.byzantine_count);
  p.tar = world.agents[self].id;
  p.il = il;
  return p;
}

class FakeTarget final : public ByzantineStrategy {
 public:
  StrategyKind kind() const noexcept override { return StrategyKind::FakeTarget; }
  void on_wake(const World& world, std::size_t) override { il_ = all_ids(world); }
  PresentedState present(const World& world, std::size_t self) override {
    return target_posture(world, self, il_);
  }
  Action act(const World&, std::size_t, const ObservationView&) override { return Action::stay(); }

 private:
  IdSetPtr il_;
};

// Poses as a target and flips its presented tar while a searcher that found
// it is inside its watch window.
class Lure final : public ByzantineStrategy {
 public:
  StrategyKind kind() const noexcept override { return StrategyKind::Lure; }
  void on_wake(const World& world, std::size_t) override { il_ = all_ids(world); }
  PresentedState present(const World& world, std::size_t self) override {
    PresentedState p = target_posture(world, self, il_);
    const AgentId me = world.agents[self].id;
    const auto X = world.protocol->clock().x();
    for (std::size_t j = 0; j < world.size(); ++j) {
      if (world.agents[j].byzantine || world.status[j] != AgentStatus::Active) continue;
      if (world.position[j] != world.position[self]) continue;
      const AgentState& s = world.state[j];
      if (s.stage != Stage::MakeGroup || s.sta != Role::MgSearch || s.tar != me || !s.pc.found) continue;
      const auto rho = world.protocol->clock().locate(s.count + 1).rho;
      if (rho >= X + 1 && rho <= 2 * X) {
        p.tar = me + 1;
        break;
      }
    }
    return p;
  }
  Action act(const World&, std::size_t, const ObservationView&) override { return Action::stay(); }

 private:
  IdSetPtr il_;
};

class FakeGroup final : public ByzantineStrategy {
 public:
  explicit FakeGroup(std::uint64_t seed) : rng_(seed) {}
  StrategyKind kind() const noexcept override { return StrategyKind::FakeGroup; }
  void on_wake(const World& world, std::size_t) override { il_ = all_ids(world); }
  PresentedState present(const World& world, std::size_t) override {
    PresentedState p;
    p.stage = Stage::Gather;
    p.sta = Role::GroupWait;
    p.end_ci = true;
    p.estf = static_cast<int>(world.byzantine_count);
    p.gef = p.estf;
    p.tar = 0;
    p.gid = 0;
    p.il = il_;
    return p;
  }
  Action act(const World&, std::size_t, const ObservationView& view) override {
    return random_move(rng_, view);
  }

 private:
  Rng rng_;
  IdSetPtr il_;
};

// Runs the honest protocol internally; subclasses distort what is shown.
class HonestCore : public ByzantineStrategy {
 public:
  void on_wake(const World& world, std::size_t self) override {
    state_ = world.protocol->initial_state(world.agents[self].id);
  }
  PresentedState present(const World& world, std::size_t self) override {
    return distort(world, self, state_.present());
  }
  Action act(const World& world, std::size_t, const ObservationView& view) override {
    const Action a = world.protocol->step(state_, view);
    return a.kind == Action::Kind::Terminate ? Action::stay() : a;
  }

 protected:
  virtual PresentedState distort(const World&, std::size_t, PresentedState p) { return p; }
  AgentState state_;
};

class MimicGood final : public HonestCore {
 public:
  StrategyKind kind() const noexcept override { return StrategyKind::MimicGood; }
};

// Shows the least popular good estf value on its node (0 if there is no
// disagreement to exploit).
class EstfLiar final : public HonestCore {
 public:
  StrategyKind kind() const noexcept override { return StrategyKind::EstfLiar; }

 protected:
  PresentedState distort(const World& world, std::size_t self, PresentedState p) override {
    std::map<int, std::size_t> votes;
    for (std::size_t j = 0; j < world.size(); ++j) {
      if (world.agents[j].byzantine || world.status[j] == AgentStatus::Dormant) continue;
      if (world.position[j] != world.position[self] || !world.state[j].estf) continue;
      ++votes[*world.state[j].estf];
    }
    if (votes.empty()) return p;
    if (votes.size() == 1) {
      p.estf = 0;
      return p;
    }
    std::vector<std::pair<std::size_t, int>> ranked;
    for (const auto& [value, c] : votes) ranked.emplace_back(c, value);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    p.estf = ranked[1].second;
    return p;
  }
};

class IdInflator final : public HonestCore {
 public:
  StrategyKind kind() const noexcept override { return StrategyKind::IdInflator; }

 protected:
  PresentedState distort(const World&, std::size_t, PresentedState p) override {
    if (p.il != source_) {
      source_ = p.il;
      IdSet forged = p.il ? *p.il : IdSet{};
      insert_id(forged, kInflatedId);
      forged_ = std::make_shared<const IdSet>(std::move(forged));
    }
    p.il = forged_;
    return p;
  }

 private:
  IdSetPtr source_;
  IdSetPtr forged_;
};

}  // namespace

std::unique_ptr<ByzantineStrategy> make_strategy(StrategyKind kind, std::uint64_t seed) {
  switch (kind) {
    case StrategyKind::Crash: return std::make_unique<Crash>();
    case StrategyKind::RandomWalk: return std::make_unique<RandomWalk>(seed);
    case StrategyKind::FakeTarget: return std::make_unique<FakeTarget>();
    case StrategyKind::Lure: return std::make_unique<Lure>();
    case StrategyKind::FakeGroup: return std::make_unique<FakeGroup>(seed);
    case StrategyKind::EstfLiar: return std::make_unique<EstfLiar>();
    case StrategyKind::IdInflator: return std::make_unique<IdInflator>();
    case StrategyKind::MimicGood: return std::make_unique<MimicGood>();
  }
  throw std::invalid_argument("unknown strategy");
}

std::vector<std::optional<Round>> wake_schedule(WakePolicy policy, std::span<const AgentSpec> agents,
                                                std::size_t x, std::uint64_t seed) {
  std::vector<std::size_t> good;
  for (std::size_t i = 0; i < agents.size(); ++i)
    if (!agents[i].byzantine) good.push_back(i);
  if (good.empty()) throw InvalidPolicy("no good agent to wake in round 1");

  std::vector<std::optional<Round>> out(agents.size());
  switch (policy) {
    case WakePolicy::AllAtOnce:
      for (auto& w : out) w = 1;
      break;
    case WakePolicy::SingleGoodFirst: {
      const auto first = *std::min_element(good.begin(), good.end(), [&](std::size_t a, std::size_t b) {
        return agents[a].id < agents[b].id;
      });
      out[first] = 1;
      break;
    }
    case WakePolicy::AdversarialStagger: {
      Rng rng(mix_seed(seed, 0x57A6));
      const auto span = static_cast<std::uint64_t>(2 * x + 1);
      for (auto& w : out) w = static_cast<Round>(uniform_below(rng, span)) + 1;
      out[good[uniform_below(rng, good.size())]] = 1;
      break;
    }
  }
  return out;
}

void validate_schedule(std::span<const AgentSpec> agents) {
  for (const auto& a : agents)
    if (!a.byzantine && a.wake_round == 1) return;
  throw InvalidPolicy("schedule wakes no good agent in round 1");
}

}  // namespace byzgather
