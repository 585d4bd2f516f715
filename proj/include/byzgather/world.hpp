#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "byzgather/agent_state.hpp"
#include "byzgather/gathering.hpp"
#include "byzgather/portgraph.hpp"

namespace byzgather {

enum class AgentStatus : std::uint8_t { Dormant, Active, Terminated };

std::string_view to_string(AgentStatus s) noexcept;

struct AgentSpec {
  AgentId id = 0;
  NodeIndex start = 0;
  bool byzantine = false;
  std::optional<Round> wake_round;  // nullopt: woken only by a visit
};

/// Complete simulation state. Good agents see only their ObservationView;
/// Byzantine strategies receive the whole World.
struct World {
  const PortGraph* graph = nullptr;
  const Protocol* protocol = nullptr;
  Round round = 0;
  std::size_t byzantine_count = 0;
  std::vector<AgentSpec> agents;
  std::vector<NodeIndex> position;
  std::vector<AgentStatus> status;
  std::vector<Port> entry_port;       // port of the last arrival, or kStartPort
  std::vector<AgentState> state;      // protocol state of good agents
  std::vector<PresentedState> presented;  // snapshot for the current round
  std::vector<NodeObservation> nodes;     // per node, current round

  std::size_t size() const noexcept { return agents.size(); }
  ObservationView view_of(std::size_t agent) const {
    const NodeIndex v = position[agent];
    return {graph->degree(v), entry_port[agent], &nodes[v]};
  }
};

}  // namespace byzgather
