#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>

#include "byzgather/agent_state.hpp"
#include "byzgather/exploration.hpp"
#include "byzgather/types.hpp"

namespace byzgather {

class TooFewIdsCollected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int floor_log2(std::uint64_t v);

/// x-th bit (1-indexed) of the periodic string "10" b1 b1 b2 b2 ... bl bl.
int extended_label_bit(AgentId id, std::int64_t x);

/// Number of CollectID phases: 2 floor(log2 id) + 6.
int cist_length(AgentId id);

/// Largest y with (4y+4)(y+1) <= il_size.
int estimate_f(std::size_t il_size);

/// Group ids with at least estf+1 distinct recorded members, ascending.
IdSet reliable_gids(const GroupEvidence& gl, int estf);

/// Most frequent value, smallest on ties; nullopt for an empty input.
template <typename Range>
std::optional<int> frequency_mode(const Range& values) {
  std::optional<int> best;
  std::size_t best_count = 0;
  for (auto it = values.begin(); it != values.end(); ++it) {
    std::size_t c = 0;
    for (auto jt = values.begin(); jt != values.end(); ++jt)
      if (*jt == *it) ++c;
    if (c > best_count || (c == best_count && *it < *best)) {
      best = *it;
      best_count = c;
    }
  }
  return best;
}

/// Where a life round falls. Rounds 1..X run the initial EXPLO; afterwards
/// cycles of three P-round phases: CollectID/MakeGroup, then two Gather phases.
class PhaseClock {
 public:
  enum class Segment : std::uint8_t { InitialExplore, MainPhase, GatherFirst, GatherSecond };

  struct Position {
    Segment segment = Segment::InitialExplore;
    std::int64_t cycle = 0;  // 0-based cycle index
    std::int64_t rho = 0;    // 1-based round within the phase (or life round in the initial EXPLO)
  };

  explicit PhaseClock(std::size_t x) : x_(static_cast<std::int64_t>(x)) {}

  std::int64_t x() const noexcept { return x_; }
  std::int64_t phase_length() const noexcept { return 3 * x_ + 1; }
  Position locate(Round count) const noexcept;

 private:
  std::int64_t x_;
};

/// Updates gef/gid/sta from the co-located MakeGroup agents (no-op once gid is set).
void consensus(AgentState& s, const ObservationView& view);

/// The good-agent protocol. Holds only immutable configuration; all agent
/// data lives in AgentState.
class Protocol {
 public:
  Protocol(std::shared_ptr<const ExplorationSequence> seq, Variant variant);

  AgentState initial_state(AgentId id) const;

  /// Advances one round in place.
  Action step(AgentState& s, const ObservationView& view) const;

  std::pair<AgentState, Action> transition(const AgentState& s, const ObservationView& view) const {
    AgentState next = s;
    const Action a = step(next, view);
    return {std::move(next), a};
  }

  std::size_t x() const noexcept { return seq_->length(); }
  const PhaseClock& clock() const noexcept { return clock_; }
  const ExplorationSequence& sequence() const noexcept { return *seq_; }
  Variant variant() const noexcept { return variant_; }

 private:
  Action explore(std::size_t step, const ObservationView& view) const;
  void prepare(AgentState& s) const;
  Action collect_id(AgentState& s, const ObservationView& view, std::int64_t rho) const;
  Action make_group(AgentState& s, const ObservationView& view, std::int64_t rho) const;
  Action gather_first(AgentState& s, const ObservationView& view, std::int64_t rho) const;
  Action gather_second(AgentState& s, const ObservationView& view, std::int64_t rho) const;
  Action finish(AgentState& s) const;

  std::shared_ptr<const ExplorationSequence> seq_;
  Variant variant_;
  PhaseClock clock_;
};

}  // namespace byzgather
