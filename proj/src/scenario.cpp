#include "byzgather/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "byzgather/gathering.hpp"
#include "byzgather/rng.hpp"

namespace byzgather {

std::string_view to_string(TeamRule r) noexcept {
  switch (r) {
    case TeamRule::Strong: return "strong";
    case TeamRule::Proof: return "proof";
    case TeamRule::Waived: return "waived";
  }
  return "?";
}

TeamRule parse_team_rule(std::string_view name) {
  for (TeamRule r : {TeamRule::Strong, TeamRule::Proof, TeamRule::Waived})
    if (to_string(r) == name) return r;
  throw ParseError("unknown team_rule '" + std::string(name) + "' (strong, proof, waived)");
}

Variant parse_variant(std::string_view name) {
  if (name == "NS") return Variant::NonSimultaneous;
  if (name == "SIM") return Variant::Simultaneous;
  throw ParseError("unknown variant '" + std::string(name) + "' (NS, SIM)");
}

std::size_t required_agents(std::size_t f, TeamRule rule) {
  switch (rule) {
    case TeamRule::Strong: return 4 * f * f + 9 * f + 4;
    case TeamRule::Proof: return (4 * f + 4) * (f + 1);
    case TeamRule::Waived: return 1;
  }
  return 1;
}

std::string ScenarioConfig::id() const {
  if (!name.empty()) return name;
  std::ostringstream os;
  os << to_string(family) << "-n" << n << "-f" << f << '-' << to_string(team_rule) << '-'
     << to_string(strategy) << '-' << to_string(wake) << "-s" << seed << '-' << to_string(variant);
  return os.str();
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end)
    throw ParseError("field '" + key + "': '" + value + "' is not a valid number");
  return out;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
std::vector<T> parse_number_list(const std::string& key, const std::string& value) {
  std::vector<T> out;
  if (value == "auto") return out;
  for (const auto& item : split_list(value)) out.push_back(parse_number<T>(key, item));
  return out;
}

// Reads "key = value" pairs, rejecting duplicates.
std::vector<std::pair<std::string, std::string>> read_pairs(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty key");
    if (!seen.insert(key).second)
      throw ParseError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

template <typename F>
auto wrap_parse(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError("field '" + key + "': " + e.what());
  }
}

template <typename T>
void write_list(std::ostream& out, const std::vector<T>& v) {
  if (v.empty()) {
    out << "auto";
    return;
  }
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
}

}  // namespace

ScenarioConfig parse_scenario(std::istream& in) {
  ScenarioConfig c;
  for (const auto& [key, value] : read_pairs(in)) {
    wrap_parse(key, [&, &key = key, &value = value] {
      if (key == "name") c.name = value;
      else if (key == "family") c.family = parse_family(value);
      else if (key == "n") c.n = parse_number<std::size_t>(key, value);
      else if (key == "graph_seed") c.graph_seed = parse_number<std::uint64_t>(key, value);
      else if (key == "N") c.max_nodes = parse_number<std::size_t>(key, value);
      else if (key == "f") c.f = parse_number<std::size_t>(key, value);
      else if (key == "k") c.k = parse_number<std::size_t>(key, value);
      else if (key == "ids") c.ids = parse_number_list<AgentId>(key, value);
      else if (key == "byzantine") c.byzantine = parse_number_list<AgentId>(key, value);
      else if (key == "starts") c.starts = parse_number_list<NodeIndex>(key, value);
      else if (key == "strategy") c.strategy = parse_strategy(value);
      else if (key == "strategy_seed") c.strategy_seed = parse_number<std::uint64_t>(key, value);
      else if (key == "wake") c.wake = parse_wake_policy(value);
      else if (key == "wake_seed") c.wake_seed = parse_number<std::uint64_t>(key, value);
      else if (key == "variant") c.variant = parse_variant(value);
      else if (key == "team_rule") c.team_rule = parse_team_rule(value);
      else if (key == "cap") c.cap = parse_number<Round>(key, value);
      else if (key == "explo_seed") c.explo_seed = parse_number<std::uint64_t>(key, value);
      else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
      else throw ParseError("unknown field '" + key + "'");
      return 0;
    });
  }
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path.string());
  ScenarioConfig c = parse_scenario(in);
  validate(c);
  return c;
}

void write_scenario(std::ostream& out, const ScenarioConfig& c, std::string_view p) {
  if (!c.name.empty()) out << p << "name = " << c.name << '\n';
  out << p << "family = " << to_string(c.family) << '\n';
  out << p << "n = " << c.n << '\n';
  out << p << "graph_seed = " << c.graph_seed << '\n';
  out << p << "N = " << c.bound_n() << '\n';
  out << p << "f = " << c.f << '\n';
  out << p << "k = " << c.team_size() << '\n';
  out << p << "ids = ";
  write_list(out, c.ids);
  out << '\n' << p << "byzantine = ";
  write_list(out, c.byzantine);
  out << '\n' << p << "starts = ";
  write_list(out, c.starts);
  out << '\n';
  out << p << "strategy = " << to_string(c.strategy) << '\n';
  out << p << "strategy_seed = " << c.strategy_seed << '\n';
  out << p << "wake = " << to_string(c.wake) << '\n';
  out << p << "wake_seed = " << c.wake_seed << '\n';
  out << p << "variant = " << to_string(c.variant) << '\n';
  out << p << "team_rule = " << to_string(c.team_rule) << '\n';
  out << p << "cap = " << c.cap << '\n';
  out << p << "explo_seed = " << c.explo_seed << '\n';
  out << p << "seed = " << c.seed << '\n';
}

namespace {

std::vector<std::string> problems_of(const ScenarioConfig& c) {
  std::vector<std::string> bad;
  const std::size_t k = c.team_size();
  if (c.n == 0) bad.push_back("n must be at least 1");
  if (c.family == FamilyKind::Ring && c.n < 3) bad.push_back("ring needs n >= 3");
  if (c.max_nodes != 0 && c.n > c.max_nodes)
    bad.push_back("n=" + std::to_string(c.n) + " exceeds N=" + std::to_string(c.max_nodes));
  if (c.team_rule != TeamRule::Waived && k < required_agents(c.f, c.team_rule))
    bad.push_back("k=" + std::to_string(k) + " is below " + std::to_string(required_agents(c.f, c.team_rule)) +
                  " required for f=" + std::to_string(c.f) + " under the " +
                  std::string(to_string(c.team_rule)) + " rule");
  if (c.f >= k) bad.push_back("f must leave at least one good agent");
  if (!c.ids.empty()) {
    if (c.ids.size() != k)
      bad.push_back("ids lists " + std::to_string(c.ids.size()) + " ids, k=" + std::to_string(k));
    std::set<AgentId> s(c.ids.begin(), c.ids.end());
    if (s.size() != c.ids.size()) bad.push_back("ids are not distinct");
    if (s.count(0)) bad.push_back("ids must be positive");
  }
  if (!c.byzantine.empty()) {
    if (c.byzantine.size() != c.f)
      bad.push_back("byzantine lists " + std::to_string(c.byzantine.size()) + " ids, f=" + std::to_string(c.f));
    std::set<AgentId> s(c.byzantine.begin(), c.byzantine.end());
    if (s.size() != c.byzantine.size()) bad.push_back("byzantine ids are not distinct");
    if (!c.ids.empty())
      for (AgentId b : c.byzantine)
        if (std::find(c.ids.begin(), c.ids.end(), b) == c.ids.end())
          bad.push_back("byzantine id " + std::to_string(b) + " is not in ids");
  }
  if (!c.starts.empty()) {
    if (c.starts.size() != k)
      bad.push_back("starts lists " + std::to_string(c.starts.size()) + " nodes, k=" + std::to_string(k));
    for (NodeIndex v : c.starts)
      if (v >= c.n) bad.push_back("start node " + std::to_string(v) + " is outside the graph");
  }
  if (c.cap < 0) bad.push_back("cap must be non-negative");
  return bad;
}

[[noreturn]] void fail(const std::vector<std::string>& bad) {
  std::string msg = "invalid scenario:";
  for (const auto& b : bad) msg += "\n  - " + b;
  throw InvalidScenario(msg);
}

}  // namespace

void validate(const ScenarioConfig& c) {
  if (auto bad = problems_of(c); !bad.empty()) fail(bad);
}

ResolvedAgents resolve_agents(const ScenarioConfig& c, std::size_t x) {
  validate(c);
  const std::size_t k = c.team_size();
  std::vector<AgentId> ids = c.ids;
  if (ids.empty()) {
    const AgentId range = std::max<AgentId>(64, static_cast<AgentId>(k));
    std::vector<AgentId> pool(range);
    for (AgentId i = 0; i < range; ++i) pool[i] = i + 1;
    Rng rng(mix_seed(c.seed, 0x1D5));
    seeded_shuffle(std::span<AgentId>(pool), rng);
    ids.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(ids.begin(), ids.end());
  }
  std::vector<AgentId> byz = c.byzantine;
  if (byz.empty() && c.f > 0) {
    std::vector<AgentId> sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    std::size_t lo = 0, hi = sorted.size();
    for (std::size_t i = 0; i < c.f; ++i) byz.push_back(i % 2 == 0 ? sorted[lo++] : sorted[--hi]);
  }
  for (AgentId b : byz)
    if (std::find(ids.begin(), ids.end(), b) == ids.end())
      fail({"byzantine id " + std::to_string(b) + " is not among the drawn ids"});
  std::vector<NodeIndex> starts = c.starts;
  if (starts.empty()) {
    Rng rng(mix_seed(c.seed, 0x5747));
    for (std::size_t i = 0; i < k; ++i) starts.push_back(static_cast<NodeIndex>(uniform_below(rng, c.n)));
  }

  ResolvedAgents out;
  for (std::size_t i = 0; i < k; ++i) {
    AgentSpec a;
    a.id = ids[i];
    a.start = starts[i];
    a.byzantine = std::find(byz.begin(), byz.end(), a.id) != byz.end();
    out.agents.push_back(a);
    out.lambda_all = std::max(out.lambda_all, a.id);
    if (!a.byzantine) out.lambda_good = std::max(out.lambda_good, a.id);
  }
  const auto wake = wake_schedule(c.wake, out.agents, x, c.wake_seed);
  for (std::size_t i = 0; i < k; ++i) out.agents[i].wake_round = wake[i];
  try {
    validate_schedule(out.agents);
  } catch (const InvalidPolicy& e) {
    fail({e.what()});
  }
  return out;
}

Round theorem1_bound(std::size_t x, std::size_t f, AgentId lambda_good) {
  const auto X = static_cast<Round>(x);
  return X + 3 * (2 * floor_log2(lambda_good) + static_cast<Round>(f) + 7) * (3 * X + 1);
}

Round theorem2_bound(std::size_t x, std::size_t f, AgentId lambda_all) {
  const auto X = static_cast<Round>(x);
  return 3 * X + 3 * (2 * floor_log2(lambda_all) + static_cast<Round>(f) + 7) * (3 * X + 1) + 1;
}

std::size_t spread_n(std::size_t family_index, std::size_t seed_index) {
  return 3 + (3 * family_index + seed_index) % 8;
}

MatrixSpec parse_matrix(std::istream& in) {
  MatrixSpec m;
  for (const auto& [key, value] : read_pairs(in)) {
    wrap_parse(key, [&, &key = key, &value = value] {
      const auto items = split_list(value);
      if (key == "families") {
        for (const auto& s : items) m.families.push_back(parse_family(s));
      } else if (key == "f") {
        m.f_values = parse_number_list<std::size_t>(key, value);
      } else if (key == "team_rules") {
        for (const auto& s : items) m.team_rules.push_back(parse_team_rule(s));
      } else if (key == "strategies") {
        for (const auto& s : items) m.strategies.push_back(parse_strategy(s));
      } else if (key == "wakes") {
        for (const auto& s : items) m.wakes.push_back(parse_wake_policy(s));
      } else if (key == "seeds") {
        m.seeds = parse_number_list<std::uint64_t>(key, value);
      } else if (key == "variants") {
        for (const auto& s : items) m.variants.push_back(parse_variant(s));
      } else if (key == "n") {
        if (value != "spread") m.n_values = parse_number_list<std::size_t>(key, value);
      } else if (key == "explo_seed") {
        m.explo_seed = parse_number<std::uint64_t>(key, value);
      } else if (key == "cap") {
        m.cap = parse_number<Round>(key, value);
      } else {
        throw ParseError("unknown matrix field '" + key + "'");
      }
      return 0;
    });
  }
  return m;
}

MatrixSpec load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file " + path.string());
  return parse_matrix(in);
}

std::vector<ScenarioConfig> expand(const MatrixSpec& m) {
  std::vector<ScenarioConfig> out;
  for (std::size_t fi = 0; fi < m.families.size(); ++fi)
    for (std::size_t si = 0; si < m.seeds.size(); ++si) {
      std::vector<std::size_t> ns = m.n_values;
      if (ns.empty()) ns.push_back(spread_n(fi, si));
      for (std::size_t n : ns)
        for (std::size_t f : m.f_values)
          for (TeamRule rule : m.team_rules)
            for (StrategyKind strategy : m.strategies)
              for (WakePolicy wake : m.wakes)
                for (Variant variant : m.variants) {
                  ScenarioConfig c;
                  c.family = m.families[fi];
                  c.n = n;
                  c.max_nodes = n;
                  c.f = f;
                  c.team_rule = rule;
                  c.strategy = strategy;
                  c.wake = wake;
                  c.variant = variant;
                  c.seed = c.graph_seed = c.strategy_seed = c.wake_seed = m.seeds[si];
                  c.explo_seed = m.explo_seed;
                  c.cap = m.cap;
                  out.push_back(std::move(c));
                }
    }
  return out;
}

}  // namespace byzgather
