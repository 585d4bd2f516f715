#include "byzgather/gathering.hpp"

#include <algorithm>
#include <bit>
#include <string>
#include <vector>

#include "byzgather/simgather.hpp"

namespace byzgather {

int floor_log2(std::uint64_t v) {
  if (v == 0) throw std::invalid_argument("log of 0");
  return static_cast<int>(std::bit_width(v)) - 1;
}

int extended_label_bit(AgentId id, std::int64_t x) {
  if (id == 0) throw std::invalid_argument("ids start at 1");
  if (x < 1) throw std::invalid_argument("extended label positions start at 1");
  const int bits = floor_log2(id) + 1;
  const std::int64_t block = 2 + 2 * static_cast<std::int64_t>(bits);
  const std::int64_t pos = (x - 1) % block;
  if (pos == 0) return 1;
  if (pos == 1) return 0;
  const int digit = static_cast<int>((pos - 2) / 2);  // 0 = most significant
  return static_cast<int>((id >> (bits - 1 - digit)) & 1U);
}

int cist_length(AgentId id) { return 2 * floor_log2(id) + 6; }

int estimate_f(std::size_t il_size) {
  if (il_size < 4)
    throw TooFewIdsCollected("estimate needs at least 4 ids, got " + std::to_string(il_size));
  int y = 0;
  while (static_cast<std::size_t>(4 * (y + 1) + 4) * static_cast<std::size_t>(y + 2) <= il_size) ++y;
  return y;
}

IdSet reliable_gids(const GroupEvidence& gl, int estf) {
  IdSet out;
  auto it = gl.begin();
  while (it != gl.end()) {
    const AgentId g = it->first;
    std::size_t members = 0;
    for (; it != gl.end() && it->first == g; ++it) ++members;
    if (members >= static_cast<std::size_t>(estf) + 1) out.push_back(g);
  }
  return out;
}

PhaseClock::Position PhaseClock::locate(Round count) const noexcept {
  Position p;
  if (count <= x_) {
    p.segment = Segment::InitialExplore;
    p.rho = count;
    return p;
  }
  const std::int64_t c = count - x_ - 1;
  const std::int64_t phase = c / phase_length();
  p.rho = c % phase_length() + 1;
  p.cycle = phase / 3;
  switch (phase % 3) {
    case 0: p.segment = Segment::MainPhase; break;
    case 1: p.segment = Segment::GatherFirst; break;
    default: p.segment = Segment::GatherSecond; break;
  }
  return p;
}

namespace {

const NodeObservation::MakeGroupSummary& make_group_summary(const NodeObservation& node) {
  if (!node.make_group) {
    NodeObservation::MakeGroupSummary s;
    std::vector<int> estfs;
    for (const auto& e : node.entries)
      if (e.state->stage == Stage::MakeGroup) {
        ++s.count;
        if (e.state->estf) estfs.push_back(*e.state->estf);
      }
    s.estf_mode = frequency_mode(estfs);
    node.make_group = s;
  }
  return *node.make_group;
}

void record_ids(AgentState& s, const ObservationView& view) {
  const IdSet& cur = *s.il;
  bool fresh = false;
  for (const auto& e : view.node->entries)
    if (!contains(cur, e.id)) {
      fresh = true;
      break;
    }
  if (!fresh) return;
  auto next = std::make_shared<IdSet>(cur);
  for (const auto& e : view.node->entries) insert_id(*next, e.id);
  s.il = std::move(next);
}

void record_groups(AgentState& s, const ObservationView& view) {
  for (const auto& e : view.node->entries)
    if (e.state->gid) s.gl.emplace(*e.state->gid, e.id);
}

}  // namespace

void consensus(AgentState& s, const ObservationView& view) {
  if (s.gid) return;
  const NodeObservation& node = *view.node;
  const auto& summary = make_group_summary(node);
  const int estf = s.estf.value_or(0);
  if (summary.count < static_cast<std::size_t>(4 * estf)) return;
  if (!summary.estf_mode) return;
  s.gef = summary.estf_mode;
  const int gef = *s.gef;

  std::size_t gc = 0;
  std::size_t smaller = 0;
  bool target_present = false;
  for (const auto& e : node.entries) {
    const PresentedState& p = *e.state;
    if (p.stage != Stage::MakeGroup || p.tar != s.tar) continue;
    ++gc;
    if (e.id < s.id) ++smaller;
    if (s.tar && e.id == *s.tar) target_present = true;
  }
  if (gc < static_cast<std::size_t>(4 * gef + 4) || !target_present) return;
  s.gid = s.tar;
  s.sta = smaller < static_cast<std::size_t>(2 * gef + 2) ? Role::GroupExplore : Role::GroupWait;
}

Protocol::Protocol(std::shared_ptr<const ExplorationSequence> seq, Variant variant)
    : seq_(std::move(seq)), variant_(variant), clock_(seq_->length()) {}

AgentState Protocol::initial_state(AgentId id) const {
  AgentState s;
  s.id = id;
  s.il = std::make_shared<const IdSet>(IdSet{id});
  prepare(s);
  return s;
}

Action Protocol::explore(std::size_t step, const ObservationView& view) const {
  if (view.degree == 0) return Action::stay();
  const Port entry = step == 0 ? kStartPort : view.entry_port;
  return Action::move(explo_step(*seq_, step, entry, view.degree));
}

// Sets the stage presented in the upcoming round and performs the
// bookkeeping that happens on entering a MakeGroup phase.
void Protocol::prepare(AgentState& s) const {
  if (s.terminated || s.stage == Stage::SimWait) return;
  const auto pos = clock_.locate(s.count + 1);
  switch (pos.segment) {
    case PhaseClock::Segment::InitialExplore: s.stage = Stage::InitialExplore; return;
    case PhaseClock::Segment::GatherFirst:
    case PhaseClock::Segment::GatherSecond: s.stage = Stage::Gather; return;
    case PhaseClock::Segment::MainPhase: break;
  }
  if (!s.end_ci) {
    s.stage = Stage::CollectId;
    return;
  }
  s.stage = Stage::MakeGroup;
  if (pos.rho != 1) return;
  s.pc.found = false;
  s.pc.found_round = 0;
  s.pc.flagged = false;
  s.pc.given_up = false;
  if (s.gid) return;
  if (s.x == 1) {
    const IdSet& il = *s.il;
    const auto rank = static_cast<std::size_t>(std::lower_bound(il.begin(), il.end(), s.id) - il.begin());
    s.sta = rank < static_cast<std::size_t>(s.estf.value_or(0)) + 1 ? Role::MgTarget : Role::MgSearch;
  }
  if (s.sta == Role::MgTarget) {
    s.tar = s.id;
  } else {
    s.tar.reset();
    for (AgentId id : *s.il)
      if (!contains(s.bl, id)) {
        s.tar = id;
        break;
      }
  }
}

Action Protocol::step(AgentState& s, const ObservationView& view) const {
  if (s.terminated) return Action::stay();
  ++s.count;
  Action a;
  if (s.stage == Stage::SimWait) {
    a = sim_step(s, view, x());
    if (a.kind == Action::Kind::Terminate) s.terminated = true;
    return a;
  }
  const auto pos = clock_.locate(s.count);
  switch (pos.segment) {
    case PhaseClock::Segment::InitialExplore:
      a = explore(static_cast<std::size_t>(pos.rho - 1), view);
      break;
    case PhaseClock::Segment::MainPhase:
      a = s.stage == Stage::CollectId ? collect_id(s, view, pos.rho) : make_group(s, view, pos.rho);
      break;
    case PhaseClock::Segment::GatherFirst: a = gather_first(s, view, pos.rho); break;
    case PhaseClock::Segment::GatherSecond: a = gather_second(s, view, pos.rho); break;
  }
  prepare(s);
  return a;
}

Action Protocol::collect_id(AgentState& s, const ObservationView& view, std::int64_t rho) const {
  const std::int64_t X = clock_.x();
  const std::int64_t P = clock_.phase_length();
  Action a;
  if (extended_label_bit(s.id, s.x) == 0) {
    record_ids(s, view);
  } else {
    if (rho >= X + 1 && rho <= 2 * X + 1) record_ids(s, view);
    if (rho >= X + 1 && rho <= 2 * X) a = explore(static_cast<std::size_t>(rho - X - 1), view);
  }
  if (rho == P) {
    if (s.x == cist_length(s.id)) {
      // fewer than 4 ids only happens outside the k >= 4 regime; estimate 0 keeps the protocol total
      s.estf = s.il->size() < 4 ? 0 : estimate_f(s.il->size());
      s.end_ci = true;
      s.x = 1;
    } else {
      ++s.x;
    }
  }
  return a;
}

Action Protocol::make_group(AgentState& s, const ObservationView& view, std::int64_t rho) const {
  const std::int64_t X = clock_.x();
  const std::int64_t P = clock_.phase_length();
  Action a;
  if (s.gid) {
    // already in a reliable group: hold position
  } else if (s.sta == Role::MgTarget) {
    consensus(s, view);
  } else if (s.tar) {
    auto& pc = s.pc;
    const AgentId tar = *s.tar;
    if (rho >= X + 1 && rho <= 2 * X + 1 && !pc.found && !pc.given_up) {
      if (view.node->find(tar)) {
        pc.found = true;
        pc.found_round = rho;
      } else if (rho <= 2 * X) {
        a = explore(static_cast<std::size_t>(rho - X - 1), view);
      } else {
        insert_id(s.bl, tar);
        pc.given_up = true;
      }
    }
    if (pc.found) {
      if (!pc.flagged) {
        const PresentedState* t = view.node->find(tar);
        const bool moved = !t && rho > pc.found_round && rho >= X + 2 && rho <= 2 * X + 1;
        const bool forged = t && rho >= X + 1 && rho <= 2 * X && t->tar != std::optional<AgentId>(tar);
        if (moved || forged) {
          pc.flagged = true;
          insert_id(s.bl, tar);
        }
      }
      consensus(s, view);
    }
  }
  if (rho == P) ++s.x;
  return a;
}

Action Protocol::gather_first(AgentState& s, const ObservationView& view, std::int64_t rho) const {
  if (!s.end_ci) return Action::stay();
  const std::int64_t X = clock_.x();
  if (s.sta == Role::GroupWait) {
    record_groups(s, view);
    return Action::stay();
  }
  if (rho >= X + 1 && rho <= 2 * X + 1) record_groups(s, view);
  if (rho >= X + 1 && rho <= 2 * X) return explore(static_cast<std::size_t>(rho - X - 1), view);
  return Action::stay();
}

Action Protocol::gather_second(AgentState& s, const ObservationView& view, std::int64_t rho) const {
  if (!s.end_ci) return Action::stay();
  const std::int64_t X = clock_.x();
  const std::int64_t P = clock_.phase_length();
  auto& pc = s.pc;
  if (rho == 1) {
    const IdSet rel = reliable_gids(s.gl, s.estf.value_or(0));
    pc.gather_gid = rel.empty() ? std::nullopt : std::optional<AgentId>(rel.front());
    pc.arrived = false;
  }
  if (!pc.gather_gid) return Action::stay();
  const AgentId g = *pc.gather_gid;
  if (s.sta == Role::GroupWait && s.gid == g) return rho == P ? finish(s) : Action::stay();

  Action a;
  if (!pc.arrived && rho >= X + 1 && rho <= 2 * X + 1) {
    std::size_t waiting = 0;
    for (const auto& e : view.node->entries)
      if (e.state->gid == g && e.state->sta == Role::GroupWait) ++waiting;
    if (waiting >= static_cast<std::size_t>(s.estf.value_or(0)) + 1)
      pc.arrived = true;
    else if (rho <= 2 * X)
      a = explore(static_cast<std::size_t>(rho - X - 1), view);
  }
  return rho == P ? finish(s) : a;
}

Action Protocol::finish(AgentState& s) const {
  if (variant_ == Variant::NonSimultaneous) {
    s.terminated = true;
    return Action::terminate();
  }
  s.stage = Stage::SimWait;
  s.sim.r_i = s.count;
  return Action::stay();
}

}  // namespace byzgather
