#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "byzgather/world.hpp"

namespace byzgather {

class InvalidPolicy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class StrategyKind : std::uint8_t {
  Crash,
  RandomWalk,
  FakeTarget,
  Lure,
  FakeGroup,
  EstfLiar,
  IdInflator,
  MimicGood,
};

inline constexpr StrategyKind kAllStrategies[] = {
    StrategyKind::Crash,     StrategyKind::RandomWalk, StrategyKind::FakeTarget,
    StrategyKind::Lure,      StrategyKind::FakeGroup,  StrategyKind::EstfLiar,
    StrategyKind::IdInflator, StrategyKind::MimicGood};

std::string_view to_string(StrategyKind k) noexcept;
StrategyKind parse_strategy(std::string_view name);

/// Id placed in forged il sets by id_inflator.
inline constexpr AgentId kInflatedId = 1'000'000;

/// Controls one Byzantine agent. Each round the engine first asks every
/// strategy what to present, builds the views, then asks for an action.
class ByzantineStrategy {
 public:
  virtual ~ByzantineStrategy() = default;
  virtual StrategyKind kind() const noexcept = 0;
  /// Called once when the agent wakes.
  virtual void on_wake(const World& world, std::size_t self) { (void)world, (void)self; }
  /// The engine overwrites the id of the result.
  virtual PresentedState present(const World& world, std::size_t self) = 0;
  virtual Action act(const World& world, std::size_t self, const ObservationView& view) = 0;
};

std::unique_ptr<ByzantineStrategy> make_strategy(StrategyKind kind, std::uint64_t seed);

enum class WakePolicy : std::uint8_t { AllAtOnce, SingleGoodFirst, AdversarialStagger };

inline constexpr WakePolicy kAllWakePolicies[] = {WakePolicy::AllAtOnce, WakePolicy::SingleGoodFirst,
                                                  WakePolicy::AdversarialStagger};

std::string_view to_string(WakePolicy p) noexcept;
WakePolicy parse_wake_policy(std::string_view name);

/// Wake round per agent (nullopt = woken only by a visit). Stagger draws
/// rounds in [1, 2X+1] and pins one seeded good agent to round 1.
std::vector<std::optional<Round>> wake_schedule(WakePolicy policy, std::span<const AgentSpec> agents,
                                                std::size_t x, std::uint64_t seed);

/// Throws InvalidPolicy unless some good agent wakes in round 1.
void validate_schedule(std::span<const AgentSpec> agents);

}  // namespace byzgather
