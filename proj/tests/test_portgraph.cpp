#include <doctest.h>

#include <queue>
#include <sstream>

#include "byzgather/portgraph.hpp"

using namespace byzgather;

namespace {

// Independent reachability oracle over the port interface only.
std::size_t reachable_from_zero(const PortGraph& g) {
  std::vector<char> seen(g.node_count(), 0);
  std::queue<NodeIndex> q;
  q.push(0);
  seen[0] = 1;
  std::size_t count = 1;
  while (!q.empty()) {
    const NodeIndex v = q.front();
    q.pop();
    for (Port p = 1; p <= g.degree(v); ++p) {
      const NodeIndex u = g.neighbor(v, p).node;
      if (!seen[u]) {
        seen[u] = 1;
        ++count;
        q.push(u);
      }
    }
  }
  return count;
}

void check_involution(const PortGraph& g) {
  for (NodeIndex v = 0; v < g.node_count(); ++v)
    for (Port p = 1; p <= g.degree(v); ++p) {
      const PortEnd far = g.neighbor(v, p);
      CHECK(far.node != v);
      CHECK(g.neighbor(far.node, far.port) == PortEnd{v, p});
    }
}

}  // namespace

TEST_CASE("build: smallest connected graph") {
  const Edge e[] = {{0, 1}};
  const auto g = PortGraph::build(2, e, {{1}, {0}});
  CHECK(g.node_count() == 2);
  CHECK(g.degree(0) == 1);
  CHECK(g.degree(1) == 1);
  CHECK(g.neighbor(0, 1) == PortEnd{1, 1});
  CHECK(g.neighbor(1, 1) == PortEnd{0, 1});
}

TEST_CASE("build: three-node ring has ports {1,2} everywhere") {
  const Edge e[] = {{0, 1}, {1, 2}, {0, 2}};
  const auto g = PortGraph::build(3, e);
  for (NodeIndex v = 0; v < 3; ++v) CHECK(g.degree(v) == 2);
  check_involution(g);
}

TEST_CASE("build: errors") {
  const Edge pairs[] = {{0, 1}, {2, 3}};
  CHECK_THROWS_AS(PortGraph::build(4, pairs), DisconnectedGraph);
  const Edge loop[] = {{0, 1}, {1, 1}};
  CHECK_THROWS_AS(PortGraph::build(2, loop), SelfLoop);
  const Edge dup[] = {{0, 1}, {1, 0}};
  CHECK_THROWS_AS(PortGraph::build(2, dup), DuplicateEdge);
  const Edge path[] = {{0, 1}, {1, 2}};
  CHECK_THROWS_AS(PortGraph::build(3, path, {{1}, {0, 0}, {1}}), DuplicatePort);
  CHECK_THROWS_AS(PortGraph::build(3, path, {{1}, {2}, {1}}), DuplicatePort);
  CHECK_THROWS_AS(PortGraph::build(0, {}), GraphError);
  const Edge outside[] = {{0, 5}};
  CHECK_THROWS_AS(PortGraph::build(2, outside), GraphError);
  try {
    PortGraph::build(4, pairs);
  } catch (const DisconnectedGraph& e) {
    CHECK(std::string(e.what()).find("node 2") != std::string::npos);
  }
}

TEST_CASE("build: explicit port order is honoured") {
  const Edge star[] = {{0, 1}, {0, 2}, {0, 3}};
  const auto g = PortGraph::build(4, star, {{3, 1, 2}, {0}, {0}, {0}});
  CHECK(g.neighbor(0, 1).node == 3);
  CHECK(g.neighbor(0, 2).node == 1);
  CHECK(g.neighbor(0, 3).node == 2);
  CHECK(g.neighbor(3, 1) == PortEnd{0, 1});
  CHECK(g.port_assignment() == PortAssignment{{3, 1, 2}, {0}, {0}, {0}});
}

TEST_CASE("neighbor") {
  const auto ring = generate({FamilyKind::Ring, 3, 0});
  const PortEnd far = ring.neighbor(0, 1);
  CHECK(ring.neighbor(far.node, far.port) == PortEnd{0, 1});
  CHECK_THROWS_AS(ring.neighbor(0, 3), PortOutOfRange);
  CHECK_THROWS_AS(ring.neighbor(0, 0), PortOutOfRange);

  const Edge e[] = {{0, 1}};
  const auto two = PortGraph::build(2, e);
  CHECK(two.neighbor(0, 1) == PortEnd{1, 1});
}

TEST_CASE("generate: fixed families") {
  const auto ring = generate({FamilyKind::Ring, 5, 0});
  CHECK(ring.node_count() == 5);
  CHECK(ring.edges().size() == 5);
  for (NodeIndex v = 0; v < 5; ++v) CHECK(ring.degree(v) == 2);

  const auto k4 = generate({FamilyKind::Complete, 4, 1});
  CHECK(k4.edges().size() == 6);
  for (NodeIndex v = 0; v < 4; ++v) CHECK(k4.degree(v) == 3);

  const auto path = generate({FamilyKind::Path, 4, 0});
  CHECK(path.degree(0) == 1);
  CHECK(path.degree(1) == 2);
  CHECK(path.edges().size() == 3);

  const auto single = generate({FamilyKind::Path, 1, 0});
  CHECK(single.node_count() == 1);
  CHECK(single.degree(0) == 0);
}

TEST_CASE("generate: random-connected 8 nodes seed 7 is connected") {
  const auto g = generate({FamilyKind::RandomConnected, 8, 7});
  CHECK(g.node_count() == 8);
  CHECK(reachable_from_zero(g) == 8);
  CHECK(g.edges().size() >= 7);
  check_involution(g);
}

TEST_CASE("generate: every family satisfies the graph invariants") {
  for (FamilyKind kind : kAllFamilies)
    for (std::size_t n = 3; n <= 10; ++n)
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto g = generate({kind, n, seed});
        CHECK(reachable_from_zero(g) == n);
        check_involution(g);
        CHECK(generate({kind, n, seed}) == g);
        if (kind == FamilyKind::RandomTree) CHECK(g.edges().size() == n - 1);
      }
}

TEST_CASE("generate: random families depend on the seed") {
  bool differs = false;
  for (std::uint64_t seed = 2; seed <= 6 && !differs; ++seed)
    differs = !(generate({FamilyKind::RandomConnected, 9, 1}) == generate({FamilyKind::RandomConnected, 9, seed}));
  CHECK(differs);
}

TEST_CASE("generate: invalid parameters") {
  CHECK_THROWS_AS(generate({FamilyKind::Ring, 2, 0}), InvalidFamilyParameters);
  CHECK_THROWS_AS(generate({FamilyKind::Complete, 0, 0}), InvalidFamilyParameters);
  CHECK_THROWS_AS(parse_family("torus"), InvalidFamilyParameters);
  CHECK(parse_family("random-tree") == FamilyKind::RandomTree);
}

TEST_CASE("graph file round trip") {
  const auto g = generate({FamilyKind::RandomConnected, 7, 3});
  std::stringstream ss;
  write_graph(ss, g);
  CHECK(parse_graph(ss) == g);

  std::istringstream canonical("3\n0 1\n1 2\n");
  const auto path = parse_graph(canonical);
  CHECK(path.neighbor(1, 1).node == 0);
  CHECK(path.neighbor(1, 2).node == 2);

  std::istringstream broken("3\n0 x\n");
  CHECK_THROWS_AS(parse_graph(broken), GraphParseError);
}
