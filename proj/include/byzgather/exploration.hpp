#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "byzgather/portgraph.hpp"

namespace byzgather {

class ExplorationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class IndexOutOfRange : public ExplorationError {
 public:
  using ExplorationError::ExplorationError;
};
class BadPort : public ExplorationError {
 public:
  using ExplorationError::ExplorationError;
};
class CertificationFailedAfterRetries : public ExplorationError {
 public:
  using ExplorationError::ExplorationError;
};

/// Offset sequence driving EXPLO(N). Each step leaves by the port
/// `entry + offset` (mod degree), relative to the port the walk came in by.
struct ExplorationSequence {
  std::vector<std::uint32_t> offsets;
  std::size_t certified_bound = 0;  // N
  std::uint64_t seed = 0;

  std::size_t length() const noexcept { return offsets.size(); }
  friend bool operator==(const ExplorationSequence&, const ExplorationSequence&) = default;
};

/// Exit port for step i: ((e - 1 + offsets[i]) mod d) + 1, with e = 1 at START.
Port explo_step(const ExplorationSequence& seq, std::size_t i, Port entry_port,
                std::uint32_t degree);

/// Number of moves of EXPLO(N) (X_N).
inline std::size_t x_n(const ExplorationSequence& seq) noexcept { return seq.length(); }

struct CertResult {
  bool pass = true;
  std::optional<NodeIndex> failing_start;
  std::optional<NodeIndex> uncovered_node;
  /// Largest number of moves any start needed to cover the graph (on pass).
  std::size_t moves_needed = 0;
};

/// Simulates the walk from every start node.
CertResult certify(const ExplorationSequence& seq, const PortGraph& g);

/// Moves needed before the walk from `start` has visited every node, or
/// nullopt if the sequence ends first. Visiting the start counts at move 0.
std::optional<std::size_t> cover_moves(std::span<const std::uint32_t> offsets, const PortGraph& g,
                                       NodeIndex start);

/// Draws seeded offsets (initial length 20 N^3, doubled on failure) and
/// returns the shortest prefix that covers every graph from every start.
ExplorationSequence build_sequence(std::size_t max_nodes, std::uint64_t seed,
                                   std::span<const PortGraph> benchmark_graphs);

inline constexpr int kCertificationRetries = 6;

/// Registered benchmark set: every family at 1..max_nodes nodes (rings from 3),
/// graph seeds 1..3, with structurally identical instances removed.
std::vector<PortGraph> benchmark_graphs(std::size_t max_nodes);

/// Cache file: header line "N seed length", then one offset per line.
void write_sequence(std::ostream& out, const ExplorationSequence& seq);
ExplorationSequence read_sequence(std::istream& in);

}  // namespace byzgather
