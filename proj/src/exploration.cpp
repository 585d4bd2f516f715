#include "byzgather/exploration.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "byzgather/rng.hpp"

namespace byzgather {

Port explo_step(const ExplorationSequence& seq, std::size_t i, Port entry_port,
                std::uint32_t degree) {
  if (i >= seq.length())
    throw IndexOutOfRange("step " + std::to_string(i) + " of a sequence of length " +
                          std::to_string(seq.length()));
  if (degree == 0) throw BadPort("cannot leave a node of degree 0");
  if (entry_port > degree)
    throw BadPort("entry port " + std::to_string(entry_port) + " exceeds degree " +
                  std::to_string(degree));
  const std::uint64_t e = entry_port == kStartPort ? 1 : entry_port;
  return static_cast<Port>((e - 1 + seq.offsets[i]) % degree) + 1;
}

std::optional<std::size_t> cover_moves(std::span<const std::uint32_t> offsets, const PortGraph& g,
                                       NodeIndex start) {
  const std::size_t n = g.node_count();
  std::vector<char> seen(n, 0);
  seen[start] = 1;
  std::size_t remaining = n - 1;
  if (remaining == 0) return 0;
  NodeIndex v = start;
  std::uint64_t e = 1;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const std::uint32_t d = g.degree(v);
    const Port exit = static_cast<Port>((e - 1 + offsets[i]) % d) + 1;
    const PortEnd next = g.neighbor_unchecked(v, exit);
    v = next.node;
    e = next.port;
    if (!seen[v]) {
      seen[v] = 1;
      if (--remaining == 0) return i + 1;
    }
  }
  return std::nullopt;
}

CertResult certify(const ExplorationSequence& seq, const PortGraph& g) {
  if (g.node_count() > seq.certified_bound)
    throw std::invalid_argument("graph has " + std::to_string(g.node_count()) +
                                " nodes, sequence is built for at most " +
                                std::to_string(seq.certified_bound));
  CertResult result;
  for (NodeIndex s = 0; s < g.node_count(); ++s) {
    const auto moves = cover_moves(seq.offsets, g, s);
    if (moves) {
      result.moves_needed = std::max(result.moves_needed, *moves);
      continue;
    }
    // report the first node this start never reaches
    std::vector<char> seen(g.node_count(), 0);
    seen[s] = 1;
    NodeIndex v = s;
    std::uint64_t e = 1;
    for (std::uint32_t off : seq.offsets) {
      const PortEnd next = g.neighbor_unchecked(v, static_cast<Port>((e - 1 + off) % g.degree(v)) + 1);
      v = next.node;
      e = next.port;
      seen[v] = 1;
    }
    result.pass = false;
    result.failing_start = s;
    result.uncovered_node = static_cast<NodeIndex>(std::find(seen.begin(), seen.end(), 0) - seen.begin());
    return result;
  }
  return result;
}

ExplorationSequence build_sequence(std::size_t max_nodes, std::uint64_t seed,
                                   std::span<const PortGraph> benchmark_graphs) {
  for (const auto& g : benchmark_graphs)
    if (g.node_count() > max_nodes)
      throw std::invalid_argument("benchmark graph with " + std::to_string(g.node_count()) +
                                  " nodes exceeds N=" + std::to_string(max_nodes));

  ExplorationSequence seq;
  seq.certified_bound = max_nodes;
  seq.seed = seed;
  if (max_nodes <= 1) return seq;

  std::size_t length = 20 * max_nodes * max_nodes * max_nodes;
  std::string last_failure;
  for (int attempt = 0; attempt <= kCertificationRetries; ++attempt, length *= 2) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(attempt)));
    std::vector<std::uint32_t> offsets(length);
    for (auto& o : offsets) o = static_cast<std::uint32_t>(rng() >> 32);

    std::size_t needed = 0;
    bool ok = true;
    for (std::size_t gi = 0; gi < benchmark_graphs.size() && ok; ++gi) {
      const auto& g = benchmark_graphs[gi];
      for (NodeIndex s = 0; s < g.node_count(); ++s) {
        const auto moves = cover_moves(offsets, g, s);
        if (!moves) {
          ok = false;
          last_failure = "graph #" + std::to_string(gi) + " from start " + std::to_string(s);
          break;
        }
        needed = std::max(needed, *moves);
      }
    }
    if (!ok) continue;
    offsets.resize(needed);
    seq.offsets = std::move(offsets);
    return seq;
  }
  throw CertificationFailedAfterRetries("no certified sequence for N=" + std::to_string(max_nodes) +
                                        " after retries; last failure: " + last_failure);
}

std::vector<PortGraph> benchmark_graphs(std::size_t max_nodes) {
  std::vector<PortGraph> out;
  for (FamilyKind kind : kAllFamilies)
    for (std::size_t n = 1; n <= max_nodes; ++n) {
      if (kind == FamilyKind::Ring && n < 3) continue;
      for (std::uint64_t s = 1; s <= 3; ++s) {
        PortGraph g = generate({kind, n, s});
        if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(std::move(g));
      }
    }
  return out;
}

void write_sequence(std::ostream& out, const ExplorationSequence& seq) {
  out << seq.certified_bound << ' ' << seq.seed << ' ' << seq.length() << '\n';
  for (std::uint32_t o : seq.offsets) out << o << '\n';
}

ExplorationSequence read_sequence(std::istream& in) {
  ExplorationSequence seq;
  std::size_t length = 0;
  if (!(in >> seq.certified_bound >> seq.seed >> length))
    throw ExplorationError("sequence file: bad header");
  seq.offsets.resize(length);
  for (auto& o : seq.offsets)
    if (!(in >> o)) throw ExplorationError("sequence file: truncated offsets");
  return seq;
}

}  // namespace byzgather
