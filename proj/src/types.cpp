#include "byzgather/types.hpp"

namespace byzgather {

std::string_view to_string(Stage s) noexcept {
  switch (s) {
    case Stage::Dormant: return "dormant";
    case Stage::InitialExplore: return "explore";
    case Stage::CollectId: return "collect_id";
    case Stage::MakeGroup: return "make_group";
    case Stage::Gather: return "gather";
    case Stage::SimWait: return "sim_wait";
  }
  return "?";
}

std::string_view to_string(Role r) noexcept {
  switch (r) {
    case Role::CollectId: return "S_CI";
    case Role::MgSearch: return "S_MG_SA";
    case Role::MgTarget: return "S_MG_TA";
    case Role::GroupExplore: return "S_G_EG";
    case Role::GroupWait: return "S_G_WG";
  }
  return "?";
}

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::NonSimultaneous: return "NS";
    case Variant::Simultaneous: return "SIM";
  }
  return "?";
}

}  // namespace byzgather
