#pragma once

#include <cstdint>
#include <string_view>

namespace byzgather {

using AgentId = std::uint32_t;
using NodeIndex = std::uint32_t;
using Round = std::int64_t;

/// Local port label, 1..d(v). kStartPort marks "no edge entered yet".
using Port = std::uint32_t;
inline constexpr Port kStartPort = 0;

/// Which part of the protocol an agent executes in the current round.
enum class Stage : std::uint8_t {
  Dormant,
  InitialExplore,
  CollectId,
  MakeGroup,
  Gather,
  SimWait,
};

/// The STA variable.
enum class Role : std::uint8_t {
  CollectId,     // S_CI
  MgSearch,      // S_MG_SA
  MgTarget,      // S_MG_TA
  GroupExplore,  // S_G_EG
  GroupWait,     // S_G_WG
};

enum class Variant : std::uint8_t { NonSimultaneous, Simultaneous };

std::string_view to_string(Stage s) noexcept;
std::string_view to_string(Role r) noexcept;
std::string_view to_string(Variant v) noexcept;

}  // namespace byzgather
