#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "byzgather/types.hpp"

namespace byzgather {

/// Sorted vector of distinct ids.
using IdSet = std::vector<AgentId>;
using IdSetPtr = std::shared_ptr<const IdSet>;

inline bool contains(const IdSet& s, AgentId id) noexcept {
  return std::binary_search(s.begin(), s.end(), id);
}

/// Returns true if the id was new.
inline bool insert_id(IdSet& s, AgentId id) {
  const auto it = std::lower_bound(s.begin(), s.end(), id);
  if (it != s.end() && *it == id) return false;
  s.insert(it, id);
  return true;
}

/// (group id, member id) evidence pairs.
using GroupEvidence = std::set<std::pair<AgentId, AgentId>>;

/// The fields other agents can read. Byzantine agents may forge everything
/// except `id`, which the engine overwrites with the true id.
struct PresentedState {
  AgentId id = 0;
  Stage stage = Stage::Dormant;
  Role sta = Role::CollectId;
  bool end_ci = false;
  std::optional<int> estf;
  std::optional<AgentId> tar;
  std::optional<int> gef;
  std::optional<AgentId> gid;
  bool flag_t = false;
  bool terminated = false;
  IdSetPtr il;  // may be null (treated as empty)
};

/// Per-phase bookkeeping that is not a named protocol variable.
struct ProgramCounter {
  // MakeGroup searcher
  bool found = false;
  std::int64_t found_round = 0;  // round within the phase
  bool flagged = false;
  bool given_up = false;
  // Gather, second phase
  std::optional<AgentId> gather_gid;
  bool arrived = false;
};

/// Extension fields for simultaneous termination.
struct SimTermState {
  bool flag_t = false;
  std::optional<AgentId> idm;
  std::optional<Round> r_i;  // own-clock round at which the base protocol completed
  std::optional<Round> threshold;  // T
};

struct AgentState {
  AgentId id = 0;
  Round count = 0;  // rounds executed since wake
  Stage stage = Stage::InitialExplore;  // stage of the round about to execute
  Role sta = Role::CollectId;
  bool end_ci = false;
  bool terminated = false;
  int x = 1;
  std::optional<int> estf;
  IdSetPtr il;
  IdSet bl;
  std::optional<AgentId> tar;
  std::optional<int> gef;
  std::optional<AgentId> gid;
  GroupEvidence gl;
  SimTermState sim;
  ProgramCounter pc;

  const IdSet& ids() const noexcept { return *il; }
  PresentedState present() const;
};

inline PresentedState AgentState::present() const {
  PresentedState p;
  p.id = id;
  p.stage = stage;
  p.sta = sta;
  p.end_ci = end_ci;
  p.estf = estf;
  p.tar = tar;
  p.gef = gef;
  p.gid = gid;
  p.flag_t = sim.flag_t;
  p.terminated = terminated;
  p.il = il;
  return p;
}

/// Everything visible on one node at the start of a round. Shared by all
/// agents on that node, so every observer reads identical content.
struct NodeObservation {
  struct Entry {
    AgentId id = 0;  // true id
    const PresentedState* state = nullptr;
  };
  std::vector<Entry> entries;

  // Observer-independent summaries, filled lazily.
  struct MakeGroupSummary {
    std::size_t count = 0;
    std::optional<int> estf_mode;
  };
  mutable std::optional<MakeGroupSummary> make_group;
  mutable std::optional<std::optional<int>> estf_mode_all;
  mutable std::vector<std::pair<int, std::optional<AgentId>>> trusted_max;  // gef -> result

  const PresentedState* find(AgentId id) const noexcept {
    for (const auto& e : entries)
      if (e.id == id) return e.state;
    return nullptr;
  }
};

struct ObservationView {
  std::uint32_t degree = 0;
  Port entry_port = kStartPort;
  const NodeObservation* node = nullptr;
};

struct Action {
  enum class Kind : std::uint8_t { Stay, Move, Terminate };
  Kind kind = Kind::Stay;
  Port port = 0;

  static Action stay() noexcept { return {}; }
  static Action move(Port p) noexcept { return {Kind::Move, p}; }
  static Action terminate() noexcept { return {Kind::Terminate, 0}; }
  friend bool operator==(const Action&, const Action&) = default;
};

}  // namespace byzgather
