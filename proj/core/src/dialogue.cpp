#include "cdplus/dialogue.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cdplus/config.hpp"

namespace cdplus {

Scenario Scenario::load(const CdxDocument& doc) {
  Scenario s;
  s.doc = doc;
  const SExpr* scenario_item = nullptr;
  const SExpr* world_item = nullptr;
  std::vector<const SExpr*> agent_items;
  for (const SExpr& item : doc.items) {
    if (item.head() == "scenario") scenario_item = &item;
    else if (item.head() == "world") world_item = &item;
    else if (item.head() == "agent") agent_items.push_back(&item);
  }
  if (!scenario_item) raise(Errc::ScenarioInvalid, "missing (scenario ...) section");
  if (!world_item) raise(Errc::ScenarioInvalid, "missing (world ...) section");
  if (agent_items.size() != 2) raise(Errc::ScenarioInvalid, "scenarios declare exactly 2 agents");

  s.name = scenario_item->kw("name")->text;
  s.max_ticks = static_cast<int>(scenario_item->kw("max-ticks")->num);
  if (s.max_ticks < 0) raise(Errc::ScenarioInvalid, "max-ticks must be >= 0");
  for (const SExpr& a : scenario_item->kw("turn-order")->items) s.turn_order.push_back(a.text);
  if (s.turn_order.size() != 2 || s.turn_order[0] == s.turn_order[1])
    raise(Errc::ScenarioInvalid, "turn order names two distinct agents");

  for (const SExpr& l : world_item->kw("locations")->items) s.world.locations.push_back(l.text);
  for (const SExpr& pair : world_item->kw("at")->items)
    s.world.place(world_key_from_text(pair.items[0].text), pair.items[1].text);
  if (const SExpr* holding = world_item->kw("holding")) {
    for (const SExpr& h : holding->items) {
      WorldKey holder = world_key_from_text(h.items[0].text);
      for (const SExpr& item : h.items[1].items)
        s.world.holding[holder].push_back(world_key_from_text(item.text));
    }
  }
  s.world.check_invariants();

  // Agent definitions, resolved against a throwaway store for want refs.
  Store probe;
  DocBuild build;
  for (const SExpr& item : doc.items)
    if (item.head() != "agent") build_item(probe, item, build, true);

  std::map<std::string, const SExpr*> by_name;
  for (const SExpr* item : agent_items) by_name[item->kw("name")->text] = item;
  for (const std::string& name : s.turn_order)
    if (!by_name.count(name)) raise(Errc::ScenarioInvalid, "turn order names unknown agent " + name);

  for (const std::string& name : s.turn_order) {
    const SExpr* item = by_name.at(name);
    AgentDef def;
    def.name = name;
    if (const SExpr* caps = item->kw("capabilities"))
      for (const SExpr& c : caps->items)
        def.capabilities[c.items[0].text] = c.items[1].text == "true";
    if (const SExpr* att = item->kw("attitudes"))
      for (const SExpr& pair : att->items)
        s.attitudes[{name, pair.items[0].text}] = pair.items[1].text;
    if (const SExpr* wants = item->kw("wants")) {
      for (const SExpr& w : wants->items) {
        CzId id = w.kind == SExpr::Kind::LabelRef
                      ? build.labels.count(w.text)
                            ? build.labels.at(w.text)
                            : throw Error(Errc::DanglingLabelRef, "unknown label " + w.text)
                      : build_cz(probe, w, build.labels, true);
        def.wants.push_back(cz_to_text(probe, id));
      }
    }
    if (const SExpr* knowledge = item->kw("knowledge"))
      for (const SExpr& k : knowledge->items) {
        std::string entry;
        for (const SExpr& part : k.items) entry += (entry.empty() ? "" : " ") + part.text;
        def.knowledge.insert(entry);
      }
    if (const SExpr* models = item->kw("models"))
      for (const SExpr& m : models->items) def.models.insert(m.text);
    s.agents.push_back(std::move(def));
  }

  for (const std::string& a : s.turn_order)
    for (const std::string& b : s.turn_order)
      if (a != b && !s.attitudes.count({a, b}))
        raise(Errc::ScenarioInvalid, "attitude of " + a + " toward " + b + " is undeclared");
  return s;
}

Simulation::Simulation(Scenario scenario, Rulebase rulebase, TemplateTable templates)
    : rulebase_(std::move(rulebase)),
      templates_(std::move(templates)),
      scenario_(std::move(scenario)),
      world_(scenario_.world) {
  rulebase_.extend(scenario_.doc);  // scenario files may carry extra rules
  shared_.rulebase = &rulebase_;
  shared_.templates = &templates_;
  shared_.attitudes = scenario_.attitudes;
  shared_.roster = scenario_.turn_order;

  for (const AgentDef& def : scenario_.agents) {
    AgentState agent;
    agent.name = def.name;
    agent.capabilities = def.capabilities;
    agent.knowledge = def.knowledge;
    agent.models = def.models;
    // Seed the mind with the scenario document (labels, anchors, knowledge czs).
    build_into_store(scenario_.doc, agent.mind, true);
    for (const std::string& want : def.wants)
      agent.intrinsic_wants.push_back(cz_from_text(agent.mind, want));
    agents_.push_back(std::move(agent));
  }
}

AgentState& Simulation::agent(const std::string& name) {
  for (AgentState& a : agents_)
    if (a.name == name) return a;
  raise(Errc::DanglingRef, "unknown agent " + name);
}

bool Simulation::finished() const {
  return tick_ >= scenario_.max_ticks || idle_ticks_ >= 2;
}

bool Simulation::step_once() {
  if (finished()) return false;
  if (!world_logged_) {
    world_logged_ = true;
    Store probe;
    for (const WorldKey& e : world_.entities) {
      if (auto loc = world_.location_of(e)) {
        CzSpec fact;
        fact.actor = probe.intern_from_text(e.text());
        fact.act = Act::Be;
        fact.to = probe.intern_from_text(*loc);
        EventId id = trace_.append(1, "world", "world-event",
                                   {{"object", e.text()}, {"at", *loc}}, {});
        trace_.remember_fact(probe.canonicalize(probe.find_or_assert(fact)), id);
      }
    }
  }
  ++tick_;
  AgentState& actor = agents_[(tick_ - 1) % agents_.size()];
  std::vector<Message> inbox = std::move(mailboxes_[actor.name]);
  mailboxes_[actor.name].clear();
  StepResult res = step(actor, inbox, world_, trace_, tick_, shared_);
  for (Message& msg : res.outbox) mailboxes_[msg.addressee].push_back(std::move(msg));
  idle_ticks_ = res.events_logged == 0 ? idle_ticks_ + 1 : 0;
  return true;
}

const Trace& Simulation::run() {
  while (step_once()) {
  }
  return trace_;
}

void Simulation::inject(const std::string& agent_name, const std::string& cz_text) {
  Message msg;
  msg.speaker = "env";
  msg.addressee = agent(agent_name).name;
  msg.text = "(injected)";
  msg.payload = cz_text;
  msg.illoc = Illocution::Inform;
  msg.utterance_event = 0;
  mailboxes_[msg.addressee].push_back(std::move(msg));
}

// --- why ---------------------------------------------------------------------------

CausalChain why(const Trace& trace, EventId id) {
  const TraceEvent* ev = trace.find(id);
  if (!ev) raise(Errc::DanglingRef, "unknown event e" + std::to_string(id));
  CausalChain chain;
  while (true) {
    chain.events.push_back(ev->id);
    if (ev->kind == "mconc-update") return chain;  // anchored at a motivation
    if (ev->prov.empty())
      raise(Errc::NoProvenance, "event e" + std::to_string(ev->id) + " has no provenance");
    ev = trace.find(ev->prov.front());
  }
}

std::vector<std::string> render_chain(const Trace& trace, const CausalChain& chain) {
  std::vector<std::string> out;
  for (EventId id : chain.events) {
    const TraceEvent* ev = trace.find(id);
    std::string line = "e" + std::to_string(ev->id) + " t" + std::to_string(ev->tick) + " " +
                       ev->agent + " " + ev->kind;
    for (const auto& [k, v] : ev->data) line += " " + k + "=" + v;
    out.push_back(std::move(line));
  }
  return out;
}

// --- bundled data -----------------------------------------------------------------------

std::string data_root() {
  if (const char* env = std::getenv("CDPLUS_DATA_ROOT"); env && *env) return env;
  return CDPLUS_DATA_ROOT_DEFAULT;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::DanglingRef, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CdxDocument load_cdx_file(const std::string& path) { return parse(read_file(path)); }

Rulebase load_builtin_rulebase() {
  return Rulebase::load(load_cdx_file(data_root() + "/rules/builtin.cdx"));
}

TemplateTable load_builtin_templates() {
  return TemplateTable::load(load_cdx_file(data_root() + "/surface/templates.cdx"));
}

}  // namespace cdplus
