#pragma once

#include <cstddef>
#include <optional>

#include "byzgather/agent_state.hpp"

namespace byzgather {

/// Largest id appearing in at least gef+1 presented il sets on the node.
std::optional<AgentId> trusted_max_id(const ObservationView& view, int gef);

/// T = 2X + 3(2 floor(log2 idm) + 6)(3X + 1).
Round sim_threshold(std::size_t x, AgentId idm);

/// One round of the waiting loop after the base protocol has completed.
/// Never moves; returns Terminate once a flag quorum is visible.
Action sim_step(AgentState& s, const ObservationView& view, std::size_t x);

}  // namespace byzgather
