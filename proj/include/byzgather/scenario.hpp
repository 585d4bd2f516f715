#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "byzgather/adversary.hpp"
#include "byzgather/portgraph.hpp"
#include "byzgather/types.hpp"

namespace byzgather {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lists every violated constraint, one per line.
class InvalidScenario : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minimum team size: strong = 4f^2+9f+4, proof = (4f+4)(f+1), waived = no check.
enum class TeamRule : std::uint8_t { Strong, Proof, Waived };

std::string_view to_string(TeamRule r) noexcept;
TeamRule parse_team_rule(std::string_view name);
Variant parse_variant(std::string_view name);
std::size_t required_agents(std::size_t f, TeamRule rule);

struct ScenarioConfig {
  std::string name;  // empty: derived from the other fields
  FamilyKind family = FamilyKind::Ring;
  std::size_t n = 3;
  std::uint64_t graph_seed = 1;
  std::size_t max_nodes = 0;  // N; 0 means n
  std::size_t f = 0;
  std::size_t k = 0;  // 0 means required_agents(f, team_rule)
  std::vector<AgentId> ids;        // empty: seeded draw from [1, 64]
  std::vector<AgentId> byzantine;  // empty: alternate lowest / highest ids
  std::vector<NodeIndex> starts;   // empty: seeded placement
  StrategyKind strategy = StrategyKind::Crash;
  std::uint64_t strategy_seed = 1;
  WakePolicy wake = WakePolicy::AllAtOnce;
  std::uint64_t wake_seed = 1;
  Variant variant = Variant::NonSimultaneous;
  TeamRule team_rule = TeamRule::Strong;
  Round cap = 0;  // 0: 4 x the Theorem 2 bound
  std::uint64_t explo_seed = 1;
  std::uint64_t seed = 1;  // id draw and start placement

  std::size_t bound_n() const noexcept { return max_nodes == 0 ? n : max_nodes; }
  std::size_t team_size() const noexcept { return k == 0 ? required_agents(f, team_rule) : k; }
  std::string id() const;
};

/// key = value lines; '#' starts a comment. Unknown keys are errors.
ScenarioConfig parse_scenario(std::istream& in);
ScenarioConfig load_scenario(const std::filesystem::path& path);
void write_scenario(std::ostream& out, const ScenarioConfig& c, std::string_view line_prefix = "");

/// Ids, Byzantine set, start nodes and wake rounds, all resolved.
struct ResolvedAgents {
  std::vector<AgentSpec> agents;
  AgentId lambda_good = 0;
  AgentId lambda_all = 0;
};

/// Resolves defaults and checks every invariant; throws InvalidScenario.
ResolvedAgents resolve_agents(const ScenarioConfig& c, std::size_t x);

/// Checks everything that does not need X_N (called by load_scenario).
void validate(const ScenarioConfig& c);

/// X + 3(2 floor(log2 L) + f + 7)(3X + 1).
Round theorem1_bound(std::size_t x, std::size_t f, AgentId lambda_good);
/// 3X + 3(2 floor(log2 L) + f + 7)(3X + 1) + 1.
Round theorem2_bound(std::size_t x, std::size_t f, AgentId lambda_all);

/// A cross product of scenario parameters. Fields hold lists; see README.
struct MatrixSpec {
  std::vector<FamilyKind> families;
  std::vector<std::size_t> f_values;
  std::vector<TeamRule> team_rules;
  std::vector<StrategyKind> strategies;
  std::vector<WakePolicy> wakes;
  std::vector<std::uint64_t> seeds;
  std::vector<Variant> variants;
  std::vector<std::size_t> n_values;  // empty: spread over 3..10
  std::uint64_t explo_seed = 1;
  Round cap = 0;
};

MatrixSpec parse_matrix(std::istream& in);
MatrixSpec load_matrix(const std::filesystem::path& path);
std::vector<ScenarioConfig> expand(const MatrixSpec& m);

/// n used for (family index, seed index) when no explicit n list is given.
std::size_t spread_n(std::size_t family_index, std::size_t seed_index);

}  // namespace byzgather
