#include "byzgather/simgather.hpp"

#include <map>
#include <vector>

#include "byzgather/gathering.hpp"

namespace byzgather {

std::optional<AgentId> trusted_max_id(const ObservationView& view, int gef) {
  const NodeObservation& node = *view.node;
  for (const auto& [g, result] : node.trusted_max)
    if (g == gef) return result;

  std::map<AgentId, std::size_t> seen;
  for (const auto& e : node.entries)
    if (e.state->il)
      for (AgentId id : *e.state->il) ++seen[id];
  std::optional<AgentId> best;
  for (const auto& [id, c] : seen)
    if (c >= static_cast<std::size_t>(gef) + 1) best = id;
  node.trusted_max.emplace_back(gef, best);
  return best;
}

Round sim_threshold(std::size_t x, AgentId idm) {
  const auto X = static_cast<Round>(x);
  return 2 * X + 3 * (2 * static_cast<Round>(floor_log2(idm)) + 6) * (3 * X + 1);
}

Action sim_step(AgentState& s, const ObservationView& view, std::size_t x) {
  const NodeObservation& node = *view.node;
  if (!node.estf_mode_all) {
    std::vector<int> estfs;
    for (const auto& e : node.entries)
      if (e.state->estf) estfs.push_back(*e.state->estf);
    node.estf_mode_all = frequency_mode(estfs);
  }
  if (*node.estf_mode_all) s.gef = *node.estf_mode_all;
  const int gef = s.gef.value_or(0);

  std::size_t flags = 0;
  for (const auto& e : node.entries)
    if (e.state->flag_t) ++flags;
  if (flags >= static_cast<std::size_t>(gef) + 1) return Action::terminate();

  if (const auto idm = trusted_max_id(view, gef)) {
    s.sim.idm = idm;
    s.sim.threshold = sim_threshold(x, *idm);
  }
  if (!s.sim.flag_t && s.sim.r_i && s.sim.threshold &&
      s.count - *s.sim.r_i >= static_cast<Round>(x) && s.count >= *s.sim.threshold)
    s.sim.flag_t = true;
  return Action::stay();
}

}  // namespace byzgather
