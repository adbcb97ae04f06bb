#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "cdplus/cdx.hpp"
#include "cdplus/matcher.hpp"
#include "cdplus/surface.hpp"

namespace cdplus {

// Per-tick trigger events. Rules anchor on these, which gives once-per-event
// firing semantics; the refractory set only has to police within-tick
// cascades. Field values: entities as text, conceptualizations as store ids.
struct TriggerEvent {
  std::string kind;
  std::map<std::string, std::variant<std::string, CzId, int>> fields;
  uint64_t source = 0;  // trace event id backing this trigger

  const CzId* cz_field(const std::string& name) const;
  const std::string* str_field(const std::string& name) const;
};

// --- rule representation ---------------------------------------------------

struct Term {  // ?var or literal symbol in engine forms
  bool is_var = false;
  std::string text;
};

struct Trigger {
  enum class Kind { OnEvent, Is, HasCausal, Peer };
  Kind kind = Kind::OnEvent;
  // OnEvent
  std::string event_kind;
  std::vector<std::pair<std::string, Term>> fields;
  // Is
  std::string var;  // also Peer var / HasCausal cause var
  std::shared_ptr<Pattern> pattern;  // Is / HasCausal effect pattern
  // HasCausal
  ModsPattern link_mods;
  // Peer
  std::string attitude;
};

struct Guard {
  enum class Kind {
    Capable,
    Not,
    AttitudeIn,
    AffectAny,
    KnowsWhyPleases,
    ProspFulfilledThisTick,
    ExistsPeer,
  };
  Kind kind = Kind::Capable;
  std::string text;               // capability flag / peer attitude
  std::string var;                // AttitudeIn / KnowsWhyPleases subject
  std::vector<std::string> set;   // AttitudeIn attitudes / AffectAny states
  std::shared_ptr<Guard> inner;   // Not
};

struct Ctor {
  enum class Kind {
    Var,
    Lit,
    Causal,
    ModsPlus,
    NegOf,
    QwhyOf,
    CompletionOf,
    ElabWant,
    RetargetWant,
  };
  Kind kind = Kind::Var;
  std::string var;                    // Var / ElabWant / RetargetWant want
  std::shared_ptr<Pattern> pattern;   // Lit
  std::shared_ptr<Ctor> sub;          // ModsPlus / NegOf / QwhyOf / CompletionOf / Causal cause
  std::shared_ptr<Ctor> sub2;         // Causal effect
  ModSet mods;                        // ModsPlus / Causal
  Term peer;                          // RetargetWant addressee
};

struct Effect {
  enum class Kind {
    Assert,
    SetAffect,
    AdoptWant,
    InvokePlanner,
    Emit,
    StoreProsp,
    AnswerWhy,
    RecordCause,
    SetWantStatus,
  };
  Kind kind = Kind::Assert;
  std::optional<Ctor> ctor;     // Assert/AdoptWant/InvokePlanner/Emit/StoreProsp payloads,
                                // SetAffect object, SetWantStatus goal
  std::optional<Ctor> ctor2;    // RecordCause cause
  std::string state;            // SetAffect state name / SetWantStatus status
  bool on = true;               // SetAffect
  Term to;                      // Emit/AnswerWhy addressee, AdoptWant source
  Illocution illoc = Illocution::Inform;
  Tone tone = Tone::Neutral;
  std::string var;              // AnswerWhy question
};

struct Clause {
  std::vector<Trigger> when;  // first trigger must be OnEvent (the anchor)
  std::vector<Guard> guards;
  std::vector<Effect> effects;
};

struct Rule {
  std::string name;
  int priority = 0;
  std::vector<Clause> clauses;
};

class Rulebase {
public:
  static Rulebase load(const CdxDocument&);  // DuplicateRuleName, UnboundEffectVariable

  // Adds user rules on top of the built-ins; names must stay unique.
  void extend(const CdxDocument&);

  const std::vector<Rule>& rules() const { return rules_; }  // (priority, name) order
  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }

private:
  std::vector<Rule> rules_;
};

// --- firing ---------------------------------------------------------------------

struct ActiveAffect {
  StateName state = StateName::Pleased;
  CzId object;
  int onset_tick = 0;
};

// Read snapshot handed to fire_cycle.
struct AgentView {
  std::string self;
  const Store* store = nullptr;
  const std::vector<TriggerEvent>* events = nullptr;
  // (holder, toward) -> attitude name; total over scenario agents
  const std::map<std::pair<std::string, std::string>, std::string>* attitudes = nullptr;
  const std::map<std::string, bool>* capabilities = nullptr;
  const std::vector<std::string>* peers = nullptr;  // roster order, self excluded
  const std::vector<ActiveAffect>* affects = nullptr;
  const std::set<std::string>* knowledge = nullptr;  // e.g. "why-answer-pleases Person"
};

struct Firing {
  const Rule* rule = nullptr;
  int clause = 0;
  Bindings binds;
  std::vector<uint64_t> sources;  // trace ids of the matched trigger events
};

// Fired (rule, bindings) pairs and committed (rule, anchor) pairs for one tick.
struct RefractoryState {
  std::set<std::string> fired;
  std::set<std::string> committed;
};

// One evaluation pass in (priority, name) order. Pure over the view; callers
// apply effects and loop to fixpoint.
std::vector<Firing> fire_cycle(const Rulebase&, const AgentView&, RefractoryState&);

const std::vector<Effect>& clause_effects(const Firing&);

}  // namespace cdplus
