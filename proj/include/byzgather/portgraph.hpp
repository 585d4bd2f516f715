#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "byzgather/types.hpp"

namespace byzgather {

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DisconnectedGraph : public GraphError {
 public:
  using GraphError::GraphError;
};
class DuplicatePort : public GraphError {
 public:
  using GraphError::GraphError;
};
class SelfLoop : public GraphError {
 public:
  using GraphError::GraphError;
};
class DuplicateEdge : public GraphError {
 public:
  using GraphError::GraphError;
};
class PortOutOfRange : public GraphError {
 public:
  using GraphError::GraphError;
};
class InvalidFamilyParameters : public GraphError {
 public:
  using GraphError::GraphError;
};
class GraphParseError : public GraphError {
 public:
  using GraphError::GraphError;
};

using Edge = std::pair<NodeIndex, NodeIndex>;

/// For each node, its neighbours listed in port order (port p is entry p-1).
/// An empty assignment means canonical numbering: neighbours by ascending index.
using PortAssignment = std::vector<std::vector<NodeIndex>>;

struct PortEnd {
  NodeIndex node = 0;
  Port port = 0;
  friend bool operator==(const PortEnd&, const PortEnd&) = default;
};

/// Anonymous connected undirected graph with local port numbering.
/// Node indices exist for bookkeeping only; agents never observe them.
/// Immutable after construction.
class PortGraph {
 public:
  static PortGraph build(std::size_t node_count, std::span<const Edge> edges,
                         const PortAssignment& ports = {});

  std::size_t node_count() const noexcept { return offsets_.size() - 1; }
  std::uint32_t degree(NodeIndex v) const { return offsets_.at(v + 1) - offsets_.at(v); }

  /// Follow port p out of v; returns the far node and the port it is entered by.
  PortEnd neighbor(NodeIndex v, Port p) const;

  /// Unchecked variant for the simulation hot path.
  PortEnd neighbor_unchecked(NodeIndex v, Port p) const noexcept { return ends_[offsets_[v] + p - 1]; }

  std::vector<Edge> edges() const;
  PortAssignment port_assignment() const;

  friend bool operator==(const PortGraph&, const PortGraph&) = default;

 private:
  PortGraph() = default;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<PortEnd> ends_;
};

enum class FamilyKind : std::uint8_t { Ring, Complete, Path, RandomTree, RandomConnected };

inline constexpr FamilyKind kAllFamilies[] = {FamilyKind::Ring, FamilyKind::Complete,
                                              FamilyKind::Path, FamilyKind::RandomTree,
                                              FamilyKind::RandomConnected};

std::string_view to_string(FamilyKind kind) noexcept;
FamilyKind parse_family(std::string_view name);

struct GraphFamily {
  FamilyKind kind = FamilyKind::Ring;
  std::size_t node_count = 3;
  std::uint64_t seed = 0;
};

/// Deterministic in (kind, node_count, seed). Ports are seed-shuffled for the
/// random families and canonical otherwise.
PortGraph generate(const GraphFamily& family);

/// Edge probability for non-tree pairs in the random-connected family.
inline constexpr double kExtraEdgeProbability = 0.3;

/// Plain-text graph format: first line n, then "u v" per edge, optionally a
/// line "ports" followed by "v: u1 u2 ..." lines giving neighbour port order.
PortGraph parse_graph(std::istream& in);
void write_graph(std::ostream& out, const PortGraph& g);

}  // namespace byzgather
