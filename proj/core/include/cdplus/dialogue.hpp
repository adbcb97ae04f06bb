#pragma once

#include <map>
#include <string>
#include <vector>

#include "cdplus/agent.hpp"

namespace cdplus {

struct AgentDef {
  std::string name;
  std::map<std::string, bool> capabilities;
  std::vector<std::string> wants;  // canonical cz text, instantiated per mind
  std::set<std::string> knowledge;
  std::set<std::string> models;
};

struct Scenario {
  std::string name;
  int max_ticks = 20;
  std::vector<std::string> turn_order;  // exactly two agents
  WorldState world;
  std::vector<AgentDef> agents;
  std::map<std::pair<std::string, std::string>, std::string> attitudes;
  CdxDocument doc;  // full document; each mind is seeded from it

  static Scenario load(const CdxDocument&);  // ScenarioInvalid on structural problems
};

// Deterministic turn-based loop: one agent steps per tick, Person-first per
// the scenario's turn order, quiescence after a full idle round.
class Simulation {
public:
  Simulation(Scenario, Rulebase, TemplateTable);
  Simulation(const Simulation&) = delete;

  const Trace& run();       // steps until quiescence or max_ticks
  bool step_once();         // false once finished
  bool finished() const;

  const Trace& trace() const { return trace_; }
  int tick() const { return tick_; }
  AgentState& agent(const std::string& name);
  const WorldState& world() const { return world_; }
  const SharedDefs& shared() const { return shared_; }

  // Queues a scripted message for an agent's next turn (REPL inject).
  void inject(const std::string& agent, const std::string& cz_text);

private:
  Rulebase rulebase_;
  TemplateTable templates_;
  Scenario scenario_;
  SharedDefs shared_;
  std::vector<AgentState> agents_;  // turn order
  WorldState world_;
  Trace trace_;
  std::map<std::string, std::vector<Message>> mailboxes_;
  int tick_ = 0;
  int idle_ticks_ = 0;
  bool world_logged_ = false;
};

// --- explanation queries ------------------------------------------------------

struct CausalChain {
  std::vector<EventId> events;  // queried event first, M-CONC anchor last
};

// Walks first-parent provenance back to an M-CONC event. NoProvenance for
// injected/scripted events; DanglingRef for unknown ids.
CausalChain why(const Trace&, EventId);

std::vector<std::string> render_chain(const Trace&, const CausalChain&);

// --- bundled data ---------------------------------------------------------------

std::string data_root();  // CDPLUS_DATA_ROOT env var, else compiled default
std::string read_file(const std::string& path);
CdxDocument load_cdx_file(const std::string& path);
Rulebase load_builtin_rulebase();
TemplateTable load_builtin_templates();

}  // namespace cdplus
