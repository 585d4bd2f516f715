#include "byzgather/simcore.hpp"

#include <ostream>
#include <string>

namespace byzgather {

StepDigest StepDigest::of(const AgentState& s) {
  StepDigest d;
  d.count = s.count;
  d.stage = s.stage;
  d.sta = s.sta;
  d.end_ci = s.end_ci;
  d.x = s.x;
  d.estf = s.estf;
  d.tar = s.tar;
  d.gef = s.gef;
  d.gid = s.gid;
  d.il_size = s.il ? s.il->size() : 0;
  d.bl_size = s.bl.size();
  d.gl_size = s.gl.size();
  d.flag_t = s.sim.flag_t;
  d.idm = s.sim.idm;
  return d;
}

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv(std::uint64_t& h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xFF;
    h *= kFnvPrime;
  }
}

class Engine {
 public:
  Engine(EngineSetup& setup, RoundObserver* observer) : setup_(setup), observer_(observer) {
    if (!setup.graph || !setup.protocol) throw std::invalid_argument("engine needs a graph and a protocol");
    if (setup.strategies.size() != setup.agents.size())
      setup.strategies.resize(setup.agents.size());
    const std::size_t k = setup.agents.size();
    w_.graph = setup.graph;
    w_.protocol = setup.protocol.get();
    w_.agents = setup.agents;
    w_.position.resize(k);
    w_.status.assign(k, AgentStatus::Dormant);
    w_.entry_port.assign(k, kStartPort);
    w_.state.resize(k);
    w_.presented.resize(k);
    w_.nodes.resize(setup.graph->node_count());
    for (std::size_t i = 0; i < k; ++i) {
      const auto& a = setup.agents[i];
      if (a.start >= setup.graph->node_count())
        throw std::invalid_argument("agent " + std::to_string(a.id) + " starts outside the graph");
      if (a.byzantine) {
        ++w_.byzantine_count;
        if (!setup.strategies[i]) throw std::invalid_argument("Byzantine agent without a strategy");
      } else {
        ++good_left_;
      }
      w_.position[i] = a.start;
    }
    trace_.agents.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      trace_.agents[i].id = setup.agents[i].id;
      trace_.agents[i].byzantine = setup.agents[i].byzantine;
    }
    trace_.digest = kFnvOffset;
    actions_.resize(k);
    stepped_.resize(k);
    visited_.resize(setup.graph->node_count());
  }

  Trace run() {
    Round r = 0;
    while (good_left_ > 0 && r < setup_.cap) {
      ++r;
      round(r);
    }
    trace_.rounds_executed = r;
    trace_.capped = good_left_ > 0;
    for (std::size_t i = 0; i < w_.size(); ++i) trace_.agents[i].final_node = w_.position[i];
    return std::move(trace_);
  }

 private:
  void wake(std::size_t i, Round first_round) {
    w_.status[i] = AgentStatus::Active;
    w_.entry_port[i] = kStartPort;
    trace_.agents[i].wake_round = first_round;
    if (w_.agents[i].byzantine)
      setup_.strategies[i]->on_wake(w_, i);
    else
      w_.state[i] = w_.protocol->initial_state(w_.agents[i].id);
  }

  void round(Round r) {
    w_.round = r;
    const std::size_t k = w_.size();
    for (std::size_t i = 0; i < k; ++i)
      if (w_.status[i] == AgentStatus::Dormant && w_.agents[i].wake_round == r) wake(i, r);

    for (std::size_t i = 0; i < k; ++i) {
      PresentedState& p = w_.presented[i];
      if (w_.status[i] == AgentStatus::Dormant) {
        p = PresentedState{};
      } else if (w_.agents[i].byzantine) {
        p = setup_.strategies[i]->present(w_, i);
      } else {
        p = w_.state[i].present();
      }
      p.id = w_.agents[i].id;
    }
    for (auto& node : w_.nodes) {
      node.entries.clear();
      node.make_group.reset();
      node.estf_mode_all.reset();
      node.trusted_max.clear();
    }
    for (std::size_t i = 0; i < k; ++i)
      w_.nodes[w_.position[i]].entries.push_back({w_.agents[i].id, &w_.presented[i]});

    for (std::size_t i = 0; i < k; ++i) {
      const TraceRecord rec{r, w_.agents[i].id, w_.position[i], w_.status[i], w_.presented[i].stage};
      fnv(trace_.digest, static_cast<std::uint64_t>(rec.round));
      fnv(trace_.digest, rec.id);
      fnv(trace_.digest, rec.node);
      fnv(trace_.digest, static_cast<std::uint64_t>(rec.status));
      fnv(trace_.digest, static_cast<std::uint64_t>(rec.stage));
      if (setup_.keep_records) trace_.records.push_back(rec);
    }

    for (std::size_t i = 0; i < k; ++i) {
      actions_[i] = Action::stay();
      stepped_[i] = w_.status[i] == AgentStatus::Active;
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (!stepped_[i] || !w_.agents[i].byzantine) continue;
      Action a = setup_.strategies[i]->act(w_, i, w_.view_of(i));
      if (a.kind == Action::Kind::Terminate ||
          (a.kind == Action::Kind::Move && (a.port < 1 || a.port > w_.graph->degree(w_.position[i]))))
        a = Action::stay();
      actions_[i] = a;
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (!stepped_[i] || w_.agents[i].byzantine) continue;
      const ObservationView view = w_.view_of(i);
      StepDigest before;
      if (observer_) before = StepDigest::of(w_.state[i]);
      actions_[i] = w_.protocol->step(w_.state[i], view);
      if (observer_) observer_->on_step(w_, i, before, w_.state[i], view);
    }
    for (std::size_t i = 0; i < k; ++i)
      if (stepped_[i]) ++trace_.agents[i].steps;
    if (observer_) observer_->on_round_end(w_);

    std::fill(visited_.begin(), visited_.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
      if (!stepped_[i]) continue;
      visited_[w_.position[i]] = 1;
      const Action& a = actions_[i];
      if (a.kind == Action::Kind::Terminate) {
        w_.status[i] = AgentStatus::Terminated;
        trace_.agents[i].termination_round = r;
        --good_left_;
      } else if (a.kind == Action::Kind::Move) {
        const PortEnd next = w_.graph->neighbor(w_.position[i], a.port);
        w_.position[i] = next.node;
        w_.entry_port[i] = next.port;
      } else {
        w_.entry_port[i] = kStartPort;
      }
      visited_[w_.position[i]] = 1;
    }
    for (std::size_t i = 0; i < k; ++i)
      if (w_.status[i] == AgentStatus::Dormant && visited_[w_.position[i]]) wake(i, r + 1);
  }

  EngineSetup& setup_;
  RoundObserver* observer_;
  World w_;
  Trace trace_;
  std::size_t good_left_ = 0;
  std::vector<Action> actions_;
  std::vector<char> stepped_;
  std::vector<char> visited_;
};

}  // namespace

Trace run(EngineSetup& setup, RoundObserver* observer) { return Engine(setup, observer).run(); }

void write_records(std::ostream& out, const Trace& trace) {
  for (const auto& rec : trace.records)
    out << rec.round << ',' << rec.id << ',' << rec.node << ',' << to_string(rec.status) << ','
        << to_string(rec.stage) << '\n';
}

}  // namespace byzgather
