#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "byzgather/adversary.hpp"
#include "byzgather/world.hpp"

namespace byzgather {

/// Scalar fields of an agent's state before a step, for observers that
/// compare old and new values without copying whole states.
struct StepDigest {
  Round count = 0;
  Stage stage = Stage::Dormant;
  Role sta = Role::CollectId;
  bool end_ci = false;
  int x = 1;
  std::optional<int> estf;
  std::optional<AgentId> tar;
  std::optional<int> gef;
  std::optional<AgentId> gid;
  std::size_t il_size = 0;
  std::size_t bl_size = 0;
  std::size_t gl_size = 0;
  bool flag_t = false;
  std::optional<AgentId> idm;

  static StepDigest of(const AgentState& s);
};

class RoundObserver {
 public:
  virtual ~RoundObserver() = default;
  /// After a good agent's transition; the world still shows round-start positions.
  virtual void on_step(const World& world, std::size_t agent, const StepDigest& before,
                       const AgentState& after, const ObservationView& view) {
    (void)world, (void)agent, (void)before, (void)after, (void)view;
  }
  /// After every transition of the round, before moves are applied.
  virtual void on_round_end(const World& world) { (void)world; }
};

struct EngineSetup {
  const PortGraph* graph = nullptr;
  std::shared_ptr<const Protocol> protocol;
  std::vector<AgentSpec> agents;
  /// Same length as agents; null for good agents.
  std::vector<std::unique_ptr<ByzantineStrategy>> strategies;
  Round cap = 0;
  bool keep_records = false;
};

struct TraceRecord {
  Round round = 0;
  AgentId id = 0;
  NodeIndex node = 0;
  AgentStatus status = AgentStatus::Dormant;
  Stage stage = Stage::Dormant;
};

struct AgentOutcome {
  AgentId id = 0;
  bool byzantine = false;
  std::optional<Round> wake_round;         // first round the agent executed
  std::optional<Round> termination_round;  // good agents only
  NodeIndex final_node = 0;
  Round steps = 0;
};

struct Trace {
  std::vector<AgentOutcome> agents;
  Round rounds_executed = 0;
  bool capped = false;
  std::uint64_t digest = 0;  // FNV-1a over all records, kept even without records
  std::vector<TraceRecord> records;
};

/// Runs rounds until every good agent has terminated or `cap` rounds ran.
Trace run(EngineSetup& setup, RoundObserver* observer = nullptr);

/// "round,id,node,status,stage" lines.
void write_records(std::ostream& out, const Trace& trace);

}  // namespace byzgather
