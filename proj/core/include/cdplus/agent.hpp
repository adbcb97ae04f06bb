#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cdplus/rules.hpp"
#include "cdplus/surface.hpp"
#include "cdplus/trace.hpp"
#include "cdplus/world.hpp"

namespace cdplus {

enum class MconcStatus : uint8_t { Active, Satisfied, Failed };
const char* mconc_status_name(MconcStatus) noexcept;

// A motivation concept: a WANT plus, once R1 ran, its elaborated
// leads-to-Pleased structure.
struct MConc {
  int id = 0;
  CzId want;
  CzId goal;
  MconcStatus status = MconcStatus::Active;
  bool adopted = false;
  std::string from;  // requesting agent, when adopted
  std::optional<CzId> elaboration;
};

enum class ProspStatus : uint8_t { Open, Fulfilled, Contradicted };
const char* prosp_status_name(ProspStatus) noexcept;

struct ProspEntry {
  CzId cz;  // carries the f modifier while prospective
  int stored_at = 0;
  ProspStatus status = ProspStatus::Open;
};

struct Message {
  std::string speaker;
  std::string addressee;
  std::string text;
  std::string payload;  // canonical (cz ...) form
  Illocution illoc = Illocution::Inform;
  EventId utterance_event = 0;  // 0 for injected messages
};

struct Utterance {
  std::string text;
  std::string template_id;
  CzId intent;
  Illocution illoc = Illocution::Inform;
  Tone tone = Tone::Neutral;
};

struct CauseRecord {
  CzId effect;
  CzId cause;
  EventId source = 0;  // trace event carrying the failure this explains
};

// Scenario-wide immutable context shared by both agents.
struct SharedDefs {
  const Rulebase* rulebase = nullptr;
  const TemplateTable* templates = nullptr;
  std::map<std::pair<std::string, std::string>, std::string> attitudes;
  std::vector<std::string> roster;  // declared order
};

struct AgentState {
  std::string name;
  Store mind;

  // MOTC
  std::vector<MConc> motc;
  std::vector<CzId> intrinsic_wants;
  bool intrinsics_installed = false;
  int next_mconc = 1;

  // EXPC
  std::vector<std::pair<int, std::string>> episodic;  // (tick, entry)
  std::vector<ProspEntry> prosp;

  // CONC
  std::map<std::string, bool> capabilities;
  std::set<std::string> models;     // peers this agent can simulate
  std::set<std::string> knowledge;  // illocution knowledge flags

  std::vector<ActiveAffect> affects;
  std::map<std::string, CauseRecord> causes;      // canonical effect cz -> record
  std::map<std::string, std::string> known_locs;  // entity text -> location text

  std::optional<Utterance> bf;
  std::string ct_phase = "perceive";
  int last_tick = 0;

  std::vector<std::string> peers(const SharedDefs&) const;
  bool affect_active(StateName) const;
  MConc* mconc_by_goal(CzId goal, const Store&);
  std::string dump(const SharedDefs&) const;  // deterministic state listing
};

struct StepResult {
  std::vector<Message> outbox;
  std::size_t events_logged = 0;
};

// One CT cycle: perceive -> appraise/deliberate to fixpoint -> act. Physical
// effects run against the world in the deliberate phase (the REAC hook).
StepResult step(AgentState&, const std::vector<Message>& inbox, WorldState&, Trace&, int tick,
                const SharedDefs&);

// Sentence assembly in BF; NoTemplate when the intent has no surface form.
Utterance mbuild(AgentState&, CzId intent, Tone, Illocution, const std::string& addressee,
                 const SharedDefs&);

// Emission: message assembly, episodic append, MBUILD->MTRANS temporal link.
Message mtrans_out(AgentState&, const std::string& addressee, Trace&, int tick,
                   EventId firing_event, const SharedDefs&,
                   std::vector<EventId> extra_prov = {});

// Runs the other-model for one cycle on a hypothetical incoming message;
// returns predicted affect czs built in this agent's own mind.
std::vector<CzId> sm_simulate(AgentState&, const Message& hypothetical,
                              const std::string& about, const SharedDefs&);

// Matches an incoming cz against PROSP; fulfilled on exact/core/completion
// match, contradicted when the negation lines up (neg-CAN against CAN).
std::vector<std::pair<std::size_t, ProspStatus>> check_prosp(AgentState&, CzId incoming,
                                                             int tick);

}  // namespace cdplus
