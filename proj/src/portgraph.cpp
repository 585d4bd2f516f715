#include "byzgather/portgraph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

#include "byzgather/rng.hpp"

namespace byzgather {

namespace {

std::string edge_name(NodeIndex u, NodeIndex v) {
  return "{" + std::to_string(u) + "," + std::to_string(v) + "}";
}

}  // namespace

PortGraph PortGraph::build(std::size_t node_count, std::span<const Edge> edges,
                           const PortAssignment& ports) {
  if (node_count == 0) throw GraphError("graph needs at least one node");

  std::vector<std::vector<NodeIndex>> adj(node_count);
  std::set<Edge> seen;
  for (const auto& [u, v] : edges) {
    if (u >= node_count || v >= node_count)
      throw GraphError("edge " + edge_name(u, v) + " references a node outside 0.." +
                       std::to_string(node_count - 1));
    if (u == v) throw SelfLoop("self-loop at node " + std::to_string(u));
    if (!seen.insert(std::minmax(u, v)).second)
      throw DuplicateEdge("duplicate edge " + edge_name(u, v));
    adj[u].push_back(v);
    adj[v].push_back(u);
  }

  if (!ports.empty()) {
    if (ports.size() != node_count)
      throw DuplicatePort("port assignment covers " + std::to_string(ports.size()) +
                          " nodes, graph has " + std::to_string(node_count));
    for (std::size_t v = 0; v < node_count; ++v) {
      std::vector<NodeIndex> given = ports[v];
      std::sort(given.begin(), given.end());
      if (std::adjacent_find(given.begin(), given.end()) != given.end())
        throw DuplicatePort("node " + std::to_string(v) + " assigns two ports to one neighbour");
      std::vector<NodeIndex> expected = adj[v];
      std::sort(expected.begin(), expected.end());
      if (given != expected)
        throw DuplicatePort("node " + std::to_string(v) +
                            " port list does not match its neighbour set");
      adj[v] = ports[v];
    }
  } else {
    for (auto& list : adj) std::sort(list.begin(), list.end());
  }

  // connectivity
  std::vector<char> reached(node_count, 0);
  std::queue<NodeIndex> frontier;
  frontier.push(0);
  reached[0] = 1;
  while (!frontier.empty()) {
    const NodeIndex v = frontier.front();
    frontier.pop();
    for (NodeIndex u : adj[v])
      if (!reached[u]) {
        reached[u] = 1;
        frontier.push(u);
      }
  }
  for (std::size_t v = 0; v < node_count; ++v)
    if (!reached[v])
      throw DisconnectedGraph("node " + std::to_string(v) + " is unreachable from node 0");

  PortGraph g;
  g.offsets_.assign(node_count + 1, 0);
  for (std::size_t v = 0; v < node_count; ++v)
    g.offsets_[v + 1] = g.offsets_[v] + static_cast<std::uint32_t>(adj[v].size());
  g.ends_.resize(g.offsets_.back());
  for (std::size_t v = 0; v < node_count; ++v) {
    for (std::size_t i = 0; i < adj[v].size(); ++i) {
      const NodeIndex u = adj[v][i];
      const auto back = std::find(adj[u].begin(), adj[u].end(), static_cast<NodeIndex>(v));
      g.ends_[g.offsets_[v] + i] = {u, static_cast<Port>(back - adj[u].begin()) + 1};
    }
  }
  return g;
}

PortEnd PortGraph::neighbor(NodeIndex v, Port p) const {
  if (v >= node_count()) throw GraphError("node " + std::to_string(v) + " does not exist");
  if (p < 1 || p > degree(v))
    throw PortOutOfRange("port " + std::to_string(p) + " at node " + std::to_string(v) +
                         " (degree " + std::to_string(degree(v)) + ")");
  return neighbor_unchecked(v, p);
}

std::vector<Edge> PortGraph::edges() const {
  std::vector<Edge> out;
  for (NodeIndex v = 0; v < node_count(); ++v)
    for (Port p = 1; p <= degree(v); ++p) {
      const NodeIndex u = neighbor_unchecked(v, p).node;
      if (v < u) out.emplace_back(v, u);
    }
  std::sort(out.begin(), out.end());
  return out;
}

PortAssignment PortGraph::port_assignment() const {
  PortAssignment out(node_count());
  for (NodeIndex v = 0; v < node_count(); ++v)
    for (Port p = 1; p <= degree(v); ++p) out[v].push_back(neighbor_unchecked(v, p).node);
  return out;
}

std::string_view to_string(FamilyKind kind) noexcept {
  switch (kind) {
    case FamilyKind::Ring: return "ring";
    case FamilyKind::Complete: return "complete";
    case FamilyKind::Path: return "path";
    case FamilyKind::RandomTree: return "random-tree";
    case FamilyKind::RandomConnected: return "random-connected";
  }
  return "?";
}

FamilyKind parse_family(std::string_view name) {
  for (FamilyKind k : kAllFamilies)
    if (to_string(k) == name) return k;
  throw InvalidFamilyParameters("unknown graph family '" + std::string(name) + "'");
}

namespace {

PortAssignment shuffled_ports(std::size_t n, const std::vector<Edge>& edges, Rng& rng) {
  PortAssignment ports(n);
  for (const auto& [u, v] : edges) {
    ports[u].push_back(v);
    ports[v].push_back(u);
  }
  for (auto& list : ports) {
    std::sort(list.begin(), list.end());
    seeded_shuffle(std::span<NodeIndex>(list), rng);
  }
  return ports;
}

std::vector<Edge> random_tree_edges(std::size_t n, Rng& rng) {
  std::vector<NodeIndex> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<NodeIndex>(i);
  seeded_shuffle(std::span<NodeIndex>(order), rng);
  std::vector<Edge> edges;
  for (std::size_t i = 1; i < n; ++i) {
    const auto parent = order[uniform_below(rng, i)];
    edges.emplace_back(std::minmax(parent, order[i]));
  }
  return edges;
}

}  // namespace

PortGraph generate(const GraphFamily& family) {
  const std::size_t n = family.node_count;
  if (n == 0) throw InvalidFamilyParameters("node count must be at least 1");
  std::vector<Edge> edges;
  switch (family.kind) {
    case FamilyKind::Ring:
      if (n < 3) throw InvalidFamilyParameters("ring needs at least 3 nodes");
      for (std::size_t i = 0; i < n; ++i)
        edges.emplace_back(std::minmax<NodeIndex>(i, (i + 1) % n));
      return PortGraph::build(n, edges);
    case FamilyKind::Complete:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
      return PortGraph::build(n, edges);
    case FamilyKind::Path:
      for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
      return PortGraph::build(n, edges);
    case FamilyKind::RandomTree: {
      Rng rng(mix_seed(family.seed, 0x7233));
      edges = random_tree_edges(n, rng);
      return PortGraph::build(n, edges, shuffled_ports(n, edges, rng));
    }
    case FamilyKind::RandomConnected: {
      Rng rng(mix_seed(family.seed, 0xC044));
      edges = random_tree_edges(n, rng);
      std::set<Edge> present(edges.begin(), edges.end());
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          const Edge e(i, j);
          if (present.count(e)) continue;
          if (uniform01(rng) < kExtraEdgeProbability) edges.push_back(e);
        }
      return PortGraph::build(n, edges, shuffled_ports(n, edges, rng));
    }
  }
  throw InvalidFamilyParameters("unknown family");
}

PortGraph parse_graph(std::istream& in) {
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw GraphParseError("empty graph file");
  std::size_t n = 0;
  {
    std::istringstream head(line);
    if (!(head >> n)) throw GraphParseError("first line must be the node count");
  }
  std::vector<Edge> edges;
  PortAssignment ports;
  bool in_ports = false;
  while (next_line()) {
    std::istringstream row(line);
    std::string first;
    row >> first;
    if (first == "ports") {
      in_ports = true;
      ports.assign(n, {});
      continue;
    }
    if (in_ports) {
      if (first.empty() || first.back() != ':')
        throw GraphParseError("ports line must start with 'v:' : " + line);
      const auto v = static_cast<std::size_t>(std::stoul(first.substr(0, first.size() - 1)));
      if (v >= n) throw GraphParseError("ports line names unknown node " + std::to_string(v));
      NodeIndex u = 0;
      while (row >> u) ports[v].push_back(u);
    } else {
      std::istringstream pair(line);
      long long u = -1, v = -1;
      if (!(pair >> u >> v) || u < 0 || v < 0) throw GraphParseError("bad edge line: " + line);
      edges.emplace_back(static_cast<NodeIndex>(u), static_cast<NodeIndex>(v));
    }
  }
  return PortGraph::build(n, edges, ports);
}

void write_graph(std::ostream& out, const PortGraph& g) {
  out << g.node_count() << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
  out << "ports\n";
  const auto ports = g.port_assignment();
  for (std::size_t v = 0; v < ports.size(); ++v) {
    out << v << ':';
    for (NodeIndex u : ports[v]) out << ' ' << u;
    out << '\n';
  }
}

}  // namespace byzgather
