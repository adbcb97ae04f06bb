#include "cdplus/agent.hpp"

#include <algorithm>

#include "cdplus/cdx.hpp"

namespace cdplus {

const char* mconc_status_name(MconcStatus s) noexcept {
  switch (s) {
    case MconcStatus::Active: return "active";
    case MconcStatus::Satisfied: return "satisfied";
    case MconcStatus::Failed: return "failed";
  }
  return "?";
}

const char* prosp_status_name(ProspStatus s) noexcept {
  switch (s) {
    case ProspStatus::Open: return "open";
    case ProspStatus::Fulfilled: return "fulfilled";
    case ProspStatus::Contradicted: return "contradicted";
  }
  return "?";
}

std::vector<std::string> AgentState::peers(const SharedDefs& shared) const {
  std::vector<std::string> out;
  for (const std::string& a : shared.roster)
    if (a != name) out.push_back(a);
  return out;
}

bool AgentState::affect_active(StateName s) const {
  return std::any_of(affects.begin(), affects.end(),
                     [&](const ActiveAffect& a) { return a.state == s; });
}

MConc* AgentState::mconc_by_goal(CzId goal, const Store& store) {
  MConc* found = nullptr;
  const std::string canon = store.canonicalize(goal);
  for (MConc& m : motc)
    if (m.status == MconcStatus::Active && store.canonicalize(m.goal) == canon) found = &m;
  return found;
}

std::string AgentState::dump(const SharedDefs& shared) const {
  std::string out = "agent " + name + " tick " + std::to_string(last_tick) + " phase " +
                    ct_phase + "\n";
  out += "capabilities:";
  for (const auto& [flag, value] : capabilities)
    out += " " + flag + "=" + (value ? "true" : "false");
  out += "\n";
  for (const std::string& peer : peers(shared))
    if (auto it = shared.attitudes.find({name, peer}); it != shared.attitudes.end())
      out += "attitude toward " + peer + ": " + it->second + "\n";
  out += "affects:";
  for (const ActiveAffect& a : affects)
    out += std::string(" ") + state_name(a.state) + "@" + std::to_string(a.onset_tick);
  out += "\n";
  for (const MConc& m : motc)
    out += "mconc m" + std::to_string(m.id) + " " + mconc_status_name(m.status) + " " +
           (m.adopted ? "adopted(" + m.from + ") " : "intrinsic ") + mind.canonicalize(m.want) +
           "\n";
  for (const ProspEntry& p : prosp)
    out += "prosp " + std::string(prosp_status_name(p.status)) + " @" +
           std::to_string(p.stored_at) + " " + mind.canonicalize(p.cz) + "\n";
  for (const auto& [k, v] : known_locs) out += "at " + k + " " + v + "\n";
  return out;
}

namespace {

// --- cz copy helpers -----------------------------------------------------------

CzSpec spec_of(const Store& store, CzId id) {
  const Conceptualization& c = store.cz(id);
  CzSpec s;
  s.actor = c.actor;
  s.act = c.act;
  s.object = c.object;
  s.from = c.from;
  s.to = c.to;
  s.instrument = c.instrument;
  s.mods = c.mods;
  s.state = c.state;
  return s;
}

CzId with_mods(Store& store, CzId id, std::initializer_list<Mod> add) {
  CzSpec s = spec_of(store, id);
  for (Mod m : add) s.mods = s.mods.with(m);
  return store.find_or_assert(s);
}

CzId without_mod(Store& store, CzId id, Mod m) {
  CzSpec s = spec_of(store, id);
  s.mods = s.mods.without(m);
  return store.find_or_assert(s);
}

// why-question formation: the core act without source/instrument detail
CzId qwhy_of(Store& store, CzId id) {
  CzSpec s = spec_of(store, id);
  s.from.reset();
  s.instrument.reset();
  s.mods = s.mods.with(Mod::Qwhy);
  return store.find_or_assert(s);
}

CzId strip_want(const Store& store, CzId id) {
  const Conceptualization& c = store.cz(id);
  if (c.act == Act::Want && std::holds_alternative<CzId>(c.object))
    return std::get<CzId>(c.object);
  return id;
}

// PTRANS completion: object located at the destination. Destinations that are
// agents resolve through the agent's location knowledge.
CzId completion_of(Store& store, CzId id, const std::map<std::string, std::string>& locs) {
  const Conceptualization& c = store.cz(strip_want(store, id));
  if (c.act == Act::Be) return without_mod(store, c.id, Mod::Can);
  if (c.act != Act::Ptrans || !std::holds_alternative<EntityId>(c.object) || !c.to)
    raise(Errc::MalformedGoal, "no completion state for " + store.canonicalize(id));
  std::string dest = store.entity_data(*c.to).text();
  if (auto it = locs.find(dest); it != locs.end()) dest = it->second;
  CzSpec s;
  s.actor = std::get<EntityId>(c.object);
  s.act = Act::Be;
  s.to = store.intern_from_text(dest);
  return store.find_or_assert(s);
}

// --- trigger event helpers -------------------------------------------------------

using Fields = std::map<std::string, std::variant<std::string, CzId, int>>;

void push_event(std::vector<TriggerEvent>& events, std::string kind, Fields fields,
                EventId source) {
  events.push_back(TriggerEvent{std::move(kind), std::move(fields), source});
}

struct TickState {
  std::vector<TriggerEvent> events;
  bool uttered = false;
};

EventId install_mconc(AgentState& agent, CzId want, bool adopted, const std::string& from,
                      Trace& trace, int tick, TickState& ts, std::vector<EventId> prov) {
  const Conceptualization& w = agent.mind.cz(want);
  if (w.act != Act::Want || !std::holds_alternative<CzId>(w.object))
    raise(Errc::BadObject, "motivation wants must be WANTs of conceptualizations");
  CzId goal = std::get<CzId>(w.object);
  MConc m;
  m.id = agent.next_mconc++;
  m.want = want;
  m.goal = goal;
  m.adopted = adopted;
  m.from = from;
  agent.motc.push_back(m);

  std::vector<std::pair<std::string, std::string>> data{
      {"mconc", "m" + std::to_string(m.id)},
      {"status", "active"},
      {"source", adopted ? "adopted" : "intrinsic"}};
  if (adopted) data.emplace_back("from", from);
  data.emplace_back("want", agent.mind.canonicalize(want));
  EventId id = trace.append(tick, agent.name, "mconc-update", std::move(data), std::move(prov));

  Fields f{{"mconc", m.id},
           {"want", want},
           {"goal", goal},
           {"source", std::string(adopted ? "adopted" : "intrinsic")}};
  if (adopted) f.emplace("from", from);
  push_event(ts.events, "mconc-new", std::move(f), id);
  push_event(ts.events, "want-new",
             Fields{{"cz", want}, {"wanter", agent.mind.entity_data(w.actor).text()}}, id);
  return id;
}

void mark_mconc(AgentState& agent, MConc& m, MconcStatus status, std::optional<CzId> unsat,
                Trace& trace, int tick, TickState& ts, std::vector<EventId> prov) {
  m.status = status;
  std::vector<std::pair<std::string, std::string>> data{
      {"mconc", "m" + std::to_string(m.id)},
      {"status", mconc_status_name(status)},
      {"source", m.adopted ? "adopted" : "intrinsic"}};
  if (m.adopted) data.emplace_back("from", m.from);
  if (unsat) data.emplace_back("unsat", agent.mind.canonicalize(*unsat));
  if (m.elaboration) data.emplace_back("elaboration", agent.mind.canonicalize(*m.elaboration));
  EventId id = trace.append(tick, agent.name, "mconc-update", std::move(data), std::move(prov));

  Fields f{{"mconc", m.id},
           {"want", m.want},
           {"goal", m.goal},
           {"source", std::string(m.adopted ? "adopted" : "intrinsic")}};
  if (m.adopted) f.emplace("from", m.from);
  if (unsat) f.emplace("unsat", *unsat);
  push_event(ts.events, status == MconcStatus::Failed ? "mconc-failed" : "mconc-satisfied",
             std::move(f), id);
}

// --- effect constructors -----------------------------------------------------------

struct EvalCtx {
  AgentState& agent;
  const Bindings& binds;
  const SharedDefs& shared;
};

CzId eval_ctor(const Ctor& c, EvalCtx& ctx);

std::string eval_term(const Term& t, const Bindings& binds) {
  if (!t.is_var) return t.text;
  auto v = binds.get(Sort::Entity, t.text);
  if (!v) raise(Errc::UnboundVariable, "entity variable ?" + t.text + " is unbound");
  return std::get<std::string>(*v);
}

CzId eval_ctor(const Ctor& c, EvalCtx& ctx) {
  Store& mind = ctx.agent.mind;
  switch (c.kind) {
    case Ctor::Kind::Var: {
      auto v = ctx.binds.get(Sort::Cz, c.var);
      if (!v) raise(Errc::UnboundVariable, "cz variable ?" + c.var + " is unbound");
      return std::get<CzId>(*v);
    }
    case Ctor::Kind::Lit: {
      MatchContext mctx;
      mctx.self = ctx.agent.name;
      return materialize(*c.pattern, ctx.binds, mind, mctx);
    }
    case Ctor::Kind::ModsPlus: {
      CzId base = eval_ctor(*c.sub, ctx);
      CzSpec s = spec_of(mind, base);
      for (Mod m : c.mods.list()) s.mods = s.mods.with(m);
      return mind.find_or_assert(s);
    }
    case Ctor::Kind::NegOf: return with_mods(mind, eval_ctor(*c.sub, ctx), {Mod::Neg});
    case Ctor::Kind::QwhyOf: return qwhy_of(mind, eval_ctor(*c.sub, ctx));
    case Ctor::Kind::CompletionOf:
      return completion_of(mind, eval_ctor(*c.sub, ctx), ctx.agent.known_locs);
    case Ctor::Kind::ElabWant: {
      auto v = ctx.binds.get(Sort::Cz, c.var);
      if (!v) raise(Errc::UnboundVariable, "cz variable ?" + c.var + " is unbound");
      CzId want = std::get<CzId>(*v);
      CzId elaborated = mind.elaborate_want(want);
      for (MConc& m : ctx.agent.motc)
        if (m.want == want && !m.elaboration) m.elaboration = elaborated;
      return elaborated;
    }
    case Ctor::Kind::RetargetWant: {
      auto v = ctx.binds.get(Sort::Cz, c.var);
      if (!v) raise(Errc::UnboundVariable, "cz variable ?" + c.var + " is unbound");
      CzId want = std::get<CzId>(*v);
      const Conceptualization& w = mind.cz(want);
      if (!std::holds_alternative<CzId>(w.object)) return want;
      const Conceptualization& goal = mind.cz(std::get<CzId>(w.object));
      if (mind.entity_data(goal.actor).text() != ctx.agent.name) return want;
      CzSpec inner = spec_of(mind, goal.id);
      inner.actor = mind.intern_from_text(eval_term(c.peer, ctx.binds));
      CzSpec outer = spec_of(mind, want);
      outer.object = mind.find_or_assert(inner);
      return mind.find_or_assert(outer);
    }
    case Ctor::Kind::Causal:
      raise(Errc::BadObject, "causal constructors are only valid under assert");
  }
  raise(Errc::BadObject, "unreachable ctor kind");
}

}  // namespace

// --- check_prosp ---------------------------------------------------------------------

std::vector<std::pair<std::size_t, ProspStatus>> check_prosp(AgentState& agent, CzId incoming,
                                                             int tick) {
  (void)tick;
  std::vector<std::pair<std::size_t, ProspStatus>> changed;
  Store& mind = agent.mind;
  const std::string inc = mind.canonicalize(incoming);
  const bool inc_neg = mind.cz(incoming).mods.has(Mod::Neg);
  const std::string inc_unneg =
      inc_neg ? mind.canonicalize(without_mod(mind, incoming, Mod::Neg)) : "";

  for (std::size_t i = 0; i < agent.prosp.size(); ++i) {
    ProspEntry& entry = agent.prosp[i];
    if (entry.status != ProspStatus::Open) continue;
    CzId stripped = without_mod(mind, entry.cz, Mod::F);
    CzId core = without_mod(mind, strip_want(mind, stripped), Mod::Can);

    if (inc_neg && inc_unneg == mind.canonicalize(stripped)) {
      entry.status = ProspStatus::Contradicted;
      changed.emplace_back(i, entry.status);
      continue;
    }
    bool fulfilled = inc == mind.canonicalize(stripped) || inc == mind.canonicalize(core);
    if (!fulfilled) {
      try {
        fulfilled = inc == mind.canonicalize(completion_of(mind, core, agent.known_locs));
      } catch (const Error&) {
        // no completion state for this entry shape
      }
    }
    if (fulfilled) {
      entry.status = ProspStatus::Fulfilled;
      changed.emplace_back(i, entry.status);
    }
  }
  return changed;
}

// --- mbuild / mtrans_out ------------------------------------------------------------------

Utterance mbuild(AgentState& agent, CzId intent, Tone tone, Illocution illoc,
                 const std::string& addressee, const SharedDefs& shared) {
  MatchContext ctx;
  ctx.self = agent.name;
  ctx.speaker = agent.name;
  ctx.addressee = addressee;
  ctx.loc_of = [&agent](const std::string& who) -> std::optional<std::string> {
    auto it = agent.known_locs.find(who);
    if (it == agent.known_locs.end()) return std::nullopt;
    return it->second;
  };
  RealizeResult r = shared.templates->realize(agent.mind, intent, tone, ctx);
  agent.bf = Utterance{r.text, r.template_id, intent, illoc, tone};
  return *agent.bf;
}

Message mtrans_out(AgentState& agent, const std::string& addressee, Trace& trace, int tick,
                   EventId firing_event, const SharedDefs& shared,
                   std::vector<EventId> extra_prov) {
  (void)shared;
  if (!agent.bf) raise(Errc::BadObject, "no utterance in BF");
  Utterance u = *agent.bf;

  Store& mind = agent.mind;
  CzSpec mb;
  mb.actor = mind.intern_from_text(agent.name);
  mb.act = Act::Mbuild;
  mb.object = u.intent;
  CzId mbuild_cz = mind.find_or_assert(mb);
  CzSpec mt;
  mt.actor = mind.intern_from_text(agent.name);
  mt.act = Act::Mtrans;
  mt.object = u.intent;
  mt.to = mind.intern_from_text(addressee);
  CzId mtrans_cz = mind.find_or_assert(mt);
  mind.add_link(TemporalLink{mbuild_cz, mtrans_cz});

  std::vector<EventId> prov{firing_event};
  for (EventId p : extra_prov) prov.push_back(p);
  EventId id = trace.append(tick, agent.name, "utterance",
                            {{"text", u.text},
                             {"illoc", illoc_name(u.illoc)},
                             {"to", addressee},
                             {"template", u.template_id},
                             {"cz", mind.canonicalize(u.intent)}},
                            std::move(prov));
  agent.episodic.emplace_back(tick, "said: " + u.text);

  Message msg;
  msg.speaker = agent.name;
  msg.addressee = addressee;
  msg.text = u.text;
  msg.payload = cz_to_text(mind, u.intent);
  msg.illoc = u.illoc;
  msg.utterance_event = id;
  agent.bf.reset();
  return msg;
}

// --- SM simulation ------------------------------------------------------------------------

std::vector<CzId> sm_simulate(AgentState& agent, const Message& hypothetical,
                              const std::string& about, const SharedDefs& shared) {
  if (!agent.models.count(about))
    raise(Errc::NoModel, agent.name + " has no model of " + about);

  AgentState model;
  model.name = about;
  model.known_locs = agent.known_locs;
  // Prospects the other agent holds after directing a want at us.
  for (const MConc& m : agent.motc) {
    if (!m.adopted || m.from != about) continue;
    CzId goal = model.mind.import_subtree(agent.mind, m.goal);
    CzSpec wants;
    wants.actor = model.mind.intern_from_text(agent.name);
    wants.act = Act::Want;
    wants.object = goal;
    wants.mods = ModSet{Mod::F};
    model.prosp.push_back(ProspEntry{model.mind.find_or_assert(wants), 0, ProspStatus::Open});
    model.prosp.push_back(ProspEntry{with_mods(model.mind, goal, {Mod::Can, Mod::F}), 0,
                                     ProspStatus::Open});
  }

  TickState ts;
  CzId payload = cz_from_text(model.mind, hypothetical.payload);
  push_event(ts.events, "msg-in",
             Fields{{"from", hypothetical.speaker},
                    {"illoc", std::string(illoc_name(hypothetical.illoc))},
                    {"payload", payload}},
             0);
  for (auto [idx, status] : check_prosp(model, payload, 0)) {
    const ProspEntry& entry = model.prosp[idx];
    CzId core = without_mod(model.mind, strip_want(model.mind, without_mod(model.mind, entry.cz, Mod::F)),
                            Mod::Can);
    push_event(ts.events,
               status == ProspStatus::Fulfilled ? "prosp-fulfilled" : "prosp-contradicted",
               Fields{{"entry", entry.cz}, {"core", core}}, 0);
  }

  AgentView view;
  view.self = model.name;
  view.store = &model.mind;
  view.events = &ts.events;
  view.attitudes = &shared.attitudes;
  view.capabilities = &model.capabilities;
  std::vector<std::string> peers = model.peers(shared);
  view.peers = &peers;
  view.affects = &model.affects;
  view.knowledge = &model.knowledge;

  RefractoryState refractory;
  std::vector<Firing> firings = fire_cycle(*shared.rulebase, view, refractory);

  std::vector<CzId> predictions;
  Store& mind = agent.mind;
  auto predict = [&](StateName state, std::optional<CzId> model_obj) {
    CzSpec s;
    s.actor = mind.intern_from_text(about);
    s.act = Act::Be;
    s.state = StateRef{state, std::nullopt};
    s.mods = ModSet{Mod::F};
    if (model_obj) s.object = mind.import_subtree(model.mind, *model_obj);
    predictions.push_back(mind.find_or_assert(s));
  };
  for (const Firing& f : firings) {
    for (const Effect& e : clause_effects(f)) {
      if (e.kind != Effect::Kind::SetAffect || !e.on) continue;
      EvalCtx ectx{model, f.binds, shared};
      std::optional<CzId> obj;
      if (e.ctor) obj = eval_ctor(*e.ctor, ectx);
      predict(*parse_state(e.state), obj);
    }
  }
  if (hypothetical.illoc == Illocution::Answer &&
      agent.knowledge.count("why-answer-pleases " + about))
    predict(StateName::Pleased, std::nullopt);
  return predictions;
}

// --- step ------------------------------------------------------------------------------------

namespace {

struct StepCtx {
  AgentState& agent;
  WorldState& world;
  Trace& trace;
  int tick;
  const SharedDefs& shared;
  TickState& ts;
  std::vector<Message>& outbox;
};

void apply_emit(StepCtx& sc, CzId intent, const std::string& addressee, Illocution illoc,
                Tone tone, EventId firing, std::vector<EventId> extra_prov) {
  if (sc.ts.uttered) return;  // one utterance per agent per tick
  mbuild(sc.agent, intent, tone, illoc, addressee, sc.shared);
  Message msg = mtrans_out(sc.agent, addressee, sc.trace, sc.tick, firing, sc.shared,
                           std::move(extra_prov));
  sc.ts.uttered = true;
  push_event(sc.ts.events, "uttered",
             Fields{{"illoc", std::string(illoc_name(illoc))},
                    {"payload", intent},
                    {"to", addressee}},
             msg.utterance_event);
  sc.outbox.push_back(std::move(msg));
}

void apply_planner(StepCtx& sc, CzId goal, EventId firing) {
  AgentState& agent = sc.agent;
  MConc* m = agent.mconc_by_goal(goal, agent.mind);
  if (!m) return;  // nothing active wants this

  CzId completion = completion_of(agent.mind, goal, agent.known_locs);
  bool capable = agent.capabilities.count("can-ptrans") && agent.capabilities.at("can-ptrans");

  std::variant<Plan, PlanFailureCz> result;
  if (capable) {
    result = plan_cz(agent.mind, completion, sc.world, world_key_from_text(agent.name));
  } else {
    result = PlanFailureCz{completion, 0};
  }

  const bool ok = std::holds_alternative<Plan>(result);
  std::vector<std::pair<std::string, std::string>> data{{"mconc", "m" + std::to_string(m->id)},
                                                        {"ok", ok ? "true" : "false"}};
  if (ok) {
    std::string steps;
    for (const PtransStep& s : std::get<Plan>(result).steps) {
      if (!steps.empty()) steps += "; ";
      steps += "PTRANS(" + s.agent.text() + "," + s.object.text() + "," + s.from + "->" + s.to + ")";
    }
    data.emplace_back("plan", steps);
  } else {
    data.emplace_back("unsat", agent.mind.canonicalize(std::get<PlanFailureCz>(result).unsatisfied));
    data.emplace_back("depth", std::to_string(std::get<PlanFailureCz>(result).at_depth));
  }
  EventId plan_ev = sc.trace.append(sc.tick, agent.name, "plan-result", std::move(data), {firing});
  Fields f{{"mconc", m->id}, {"ok", std::string(ok ? "true" : "false")}};
  if (!ok) f.emplace("unsat", std::get<PlanFailureCz>(result).unsatisfied);
  push_event(sc.ts.events, "plan-result", std::move(f), plan_ev);

  if (ok) {
    for (const WorldEvent& we : execute(std::get<Plan>(result), sc.world)) {
      EventId wid = sc.trace.append(sc.tick, "world", "world-event",
                                    {{"action", "PTRANS"},
                                     {"agent", we.step.agent.text()},
                                     {"object", we.step.object.text()},
                                     {"from", we.step.from},
                                     {"to", we.step.to}},
                                    {plan_ev});
      Store& mind = agent.mind;
      CzSpec fact;
      fact.actor = mind.intern_from_text(we.step.object.text());
      fact.act = Act::Be;
      fact.to = mind.intern_from_text(we.step.to);
      sc.trace.remember_fact(mind.canonicalize(mind.find_or_assert(fact)), wid);
      agent.known_locs[we.step.object.text()] = we.step.to;
    }
    mark_mconc(agent, *m, MconcStatus::Satisfied, std::nullopt, sc.trace, sc.tick, sc.ts,
               {plan_ev});
  } else {
    CzId unsat = std::get<PlanFailureCz>(result).unsatisfied;
    mark_mconc(agent, *m, MconcStatus::Failed, unsat, sc.trace, sc.tick, sc.ts, {plan_ev});
    if (m->adopted && agent.models.count(m->from)) {
      // Anticipate the requester's reaction to hearing about the failure.
      Message hyp;
      hyp.speaker = agent.name;
      hyp.addressee = m->from;
      hyp.illoc = Illocution::Inform;
      hyp.payload = cz_to_text(agent.mind, with_mods(agent.mind, goal, {Mod::Can, Mod::Neg}));
      std::vector<CzId> preds = sm_simulate(agent, hyp, m->from, sc.shared);
      if (!preds.empty()) {
        std::optional<CzId> negative;
        std::string all;
        for (CzId p : preds) {
          if (!all.empty()) all += "; ";
          all += agent.mind.canonicalize(p);
          const auto& st = agent.mind.cz(p).state;
          if (!negative && st &&
              (st->name == StateName::Disappointed || st->name == StateName::Displeased))
            negative = p;
        }
        std::vector<std::pair<std::string, std::string>> pdata{{"about", m->from}, {"czs", all}};
        if (negative) pdata.emplace_back("negative", agent.mind.canonicalize(*negative));
        EventId pid =
            sc.trace.append(sc.tick, agent.name, "prediction", std::move(pdata), {plan_ev});
        Fields pf{{"about", m->from}};
        if (negative) pf.emplace("negative", *negative);
        push_event(sc.ts.events, "prediction", std::move(pf), pid);
      }
    }
  }
}

void apply_effect(StepCtx& sc, const Effect& e, const Firing& f, EventId firing_ev) {
  AgentState& agent = sc.agent;
  EvalCtx ectx{agent, f.binds, sc.shared};
  switch (e.kind) {
    case Effect::Kind::Assert: {
      if (e.ctor->kind == Ctor::Kind::Causal) {
        CzId cause = eval_ctor(*e.ctor->sub, ectx);
        CzId effect_cz = eval_ctor(*e.ctor->sub2, ectx);
        agent.mind.find_or_link(CausalLink{cause, effect_cz}, e.ctor->mods);
      } else {
        eval_ctor(*e.ctor, ectx);
      }
      return;
    }
    case Effect::Kind::SetAffect: {
      StateName state = *parse_state(e.state);
      if (e.on) {
        CzId object = eval_ctor(*e.ctor, ectx);
        const std::string canon = agent.mind.canonicalize(object);
        for (const ActiveAffect& a : agent.affects)
          if (a.state == state && agent.mind.canonicalize(a.object) == canon) return;
        agent.affects.push_back(ActiveAffect{state, object, sc.tick});
        agent.mind.add_link(StateAttrLink{agent.mind.intern_from_text(agent.name),
                                          StateRef{state, std::nullopt}, object});
        EventId id = sc.trace.append(sc.tick, agent.name, "affect-onset",
                                     {{"state", state_name(state)}, {"object", canon}},
                                     {firing_ev});
        push_event(sc.ts.events, "affect-onset",
                   Fields{{"state", std::string(state_name(state))}, {"object", object}}, id);
      } else {
        auto it = std::remove_if(agent.affects.begin(), agent.affects.end(),
                                 [&](const ActiveAffect& a) { return a.state == state; });
        if (it == agent.affects.end()) return;  // nothing to clear
        agent.affects.erase(it, agent.affects.end());
        EventId id = sc.trace.append(sc.tick, agent.name, "affect-offset",
                                     {{"state", state_name(state)}}, {firing_ev});
        push_event(sc.ts.events, "affect-offset",
                   Fields{{"state", std::string(state_name(state))}}, id);
      }
      return;
    }
    case Effect::Kind::AdoptWant: {
      CzId goal = eval_ctor(*e.ctor, ectx);
      std::string from = eval_term(e.to, f.binds);
      CzSpec want;
      want.actor = agent.mind.intern_from_text(agent.name);
      want.act = Act::Want;
      want.object = goal;
      install_mconc(agent, agent.mind.find_or_assert(want), true, from, sc.trace, sc.tick,
                    sc.ts, {firing_ev});
      return;
    }
    case Effect::Kind::InvokePlanner: {
      apply_planner(sc, eval_ctor(*e.ctor, ectx), firing_ev);
      return;
    }
    case Effect::Kind::Emit: {
      apply_emit(sc, eval_ctor(*e.ctor, ectx), eval_term(e.to, f.binds), e.illoc, e.tone,
                 firing_ev, {});
      return;
    }
    case Effect::Kind::StoreProsp: {
      CzId entry = with_mods(agent.mind, eval_ctor(*e.ctor, ectx), {Mod::F});
      CzSpec envelope;
      envelope.actor = agent.mind.intern_from_text(agent.name);
      envelope.act = Act::Concp;
      envelope.object = entry;
      agent.mind.find_or_assert(envelope);
      agent.prosp.push_back(ProspEntry{entry, sc.tick, ProspStatus::Open});
      sc.trace.append(sc.tick, agent.name, "prosp-update",
                      {{"entry", agent.mind.canonicalize(entry)}, {"status", "stored"}},
                      {firing_ev});
      return;
    }
    case Effect::Kind::AnswerWhy: {
      auto q = f.binds.get(Sort::Cz, e.var);
      if (!q) raise(Errc::UnboundVariable, "cz variable ?" + e.var + " is unbound");
      CzId core = without_mod(agent.mind, std::get<CzId>(*q), Mod::Qwhy);
      const Conceptualization& qc = agent.mind.cz(core);
      for (const auto& [canon, record] : agent.causes) {
        const Conceptualization& ec = agent.mind.cz(record.effect);
        if (ec.act != qc.act || ec.mods != qc.mods) continue;
        auto ent = [&](const std::optional<EntityId>& a) {
          return a ? agent.mind.entity_data(*a).text() : std::string();
        };
        if (agent.mind.entity_data(ec.actor).text() !=
            agent.mind.entity_data(qc.actor).text())
          continue;
        if (std::holds_alternative<EntityId>(qc.object) &&
            (!std::holds_alternative<EntityId>(ec.object) ||
             agent.mind.entity_data(std::get<EntityId>(qc.object)).text() !=
                 agent.mind.entity_data(std::get<EntityId>(ec.object)).text()))
          continue;
        if (qc.to && ent(qc.to) != ent(ec.to)) continue;
        if (qc.from && ent(qc.from) != ent(ec.from)) continue;
        apply_emit(sc, record.cause, eval_term(e.to, f.binds), Illocution::Answer, Tone::Neutral,
                   firing_ev, {record.source});
        return;
      }
      return;  // no recorded cause: stay silent
    }
    case Effect::Kind::RecordCause: {
      CzId effect_cz = eval_ctor(*e.ctor, ectx);
      CzId cause = eval_ctor(*e.ctor2, ectx);
      EventId source = f.sources.empty() ? firing_ev : f.sources.front();
      agent.causes[agent.mind.canonicalize(effect_cz)] = CauseRecord{effect_cz, cause, source};
      return;
    }
    case Effect::Kind::SetWantStatus: {
      CzId goal = eval_ctor(*e.ctor, ectx);
      MConc* m = agent.mconc_by_goal(goal, agent.mind);
      if (m && e.state == "failed")
        mark_mconc(agent, *m, MconcStatus::Failed, std::nullopt, sc.trace, sc.tick, sc.ts,
                   {firing_ev});
      return;
    }
  }
}

}  // namespace

StepResult step(AgentState& agent, const std::vector<Message>& inbox, WorldState& world,
                Trace& trace, int tick, const SharedDefs& shared) {
  StepResult result;
  const std::size_t trace_before = trace.size();
  TickState ts;
  StepCtx sc{agent, world, trace, tick, shared, ts, result.outbox};

  // perceive
  agent.ct_phase = "perceive";
  if (!agent.intrinsics_installed) {
    agent.intrinsics_installed = true;
    for (CzId w : agent.intrinsic_wants) install_mconc(agent, w, false, "", trace, tick, ts, {});
  }

  std::vector<CzId> percepts = observe(world, agent.mind);
  std::vector<CzId> new_facts;
  for (CzId p : percepts) {
    const Conceptualization& c = agent.mind.cz(p);
    const std::string obj = agent.mind.entity_data(c.actor).text();
    const std::string loc = agent.mind.entity_data(*c.to).text();
    auto it = agent.known_locs.find(obj);
    if (it == agent.known_locs.end() || it->second != loc) {
      agent.known_locs[obj] = loc;
      new_facts.push_back(p);
    }
  }

  // goal completions observed in the world satisfy active wants
  for (MConc& m : agent.motc) {
    if (m.status != MconcStatus::Active) continue;
    CzId completion;
    try {
      completion = completion_of(agent.mind, m.goal, agent.known_locs);
    } catch (const Error&) {
      continue;
    }
    const std::string canon = agent.mind.canonicalize(completion);
    for (CzId p : percepts) {
      if (agent.mind.canonicalize(p) != canon) continue;
      std::vector<EventId> prov;
      if (auto src = trace.fact_source(canon)) prov.push_back(*src);
      mark_mconc(agent, m, MconcStatus::Satisfied, std::nullopt, trace, tick, ts,
                 std::move(prov));
      break;
    }
  }

  // inbox
  for (const Message& msg : inbox) {
    CzId payload;
    try {
      payload = cz_from_text(agent.mind, msg.payload);
    } catch (const Error& err) {
      trace.append(tick, agent.name, "world-event",
                   {{"note", "malformed message ignored"}, {"error", err.what()}},
                   {msg.utterance_event});
      continue;
    }
    agent.episodic.emplace_back(tick, "heard: " + msg.text);
    push_event(ts.events, "msg-in",
               Fields{{"from", msg.speaker},
                      {"illoc", std::string(illoc_name(msg.illoc))},
                      {"payload", payload}},
               msg.utterance_event);
    const Conceptualization& pc = agent.mind.cz(payload);
    if (pc.act == Act::Want)
      push_event(ts.events, "want-new",
                 Fields{{"cz", payload}, {"wanter", agent.mind.entity_data(pc.actor).text()}},
                 msg.utterance_event);
    for (auto [idx, status] : check_prosp(agent, payload, tick)) {
      const ProspEntry& entry = agent.prosp[idx];
      EventId id = trace.append(tick, agent.name, "prosp-update",
                                {{"entry", agent.mind.canonicalize(entry.cz)},
                                 {"status", prosp_status_name(status)}},
                                {msg.utterance_event});
      CzId core = without_mod(
          agent.mind, strip_want(agent.mind, without_mod(agent.mind, entry.cz, Mod::F)),
          Mod::Can);
      push_event(ts.events,
                 status == ProspStatus::Fulfilled ? "prosp-fulfilled" : "prosp-contradicted",
                 Fields{{"entry", entry.cz}, {"core", core}}, id);
    }
  }

  // percept-driven prospect resolution
  for (CzId p : new_facts) {
    for (auto [idx, status] : check_prosp(agent, p, tick)) {
      const ProspEntry& entry = agent.prosp[idx];
      std::vector<EventId> prov;
      if (auto src = trace.fact_source(agent.mind.canonicalize(p))) prov.push_back(*src);
      EventId id = trace.append(tick, agent.name, "prosp-update",
                                {{"entry", agent.mind.canonicalize(entry.cz)},
                                 {"status", prosp_status_name(status)}},
                                std::move(prov));
      CzId core = without_mod(
          agent.mind, strip_want(agent.mind, without_mod(agent.mind, entry.cz, Mod::F)),
          Mod::Can);
      push_event(ts.events,
                 status == ProspStatus::Fulfilled ? "prosp-fulfilled" : "prosp-contradicted",
                 Fields{{"entry", entry.cz}, {"core", core}}, id);
    }
  }

  // appraise / deliberate to fixpoint
  agent.ct_phase = "appraise";
  RefractoryState refractory;
  std::vector<std::string> peers = agent.peers(shared);
  for (int pass = 0; pass < 64; ++pass) {
    AgentView view;
    view.self = agent.name;
    view.store = &agent.mind;
    view.events = &ts.events;
    view.attitudes = &shared.attitudes;
    view.capabilities = &agent.capabilities;
    view.peers = &peers;
    view.affects = &agent.affects;
    view.knowledge = &agent.knowledge;
    std::vector<Firing> firings = fire_cycle(*shared.rulebase, view, refractory);
    if (firings.empty()) break;
    agent.ct_phase = "deliberate";
    for (const Firing& f : firings) {
      EventId firing_ev = trace.append(tick, agent.name, "rule-firing",
                                       {{"rule", f.rule->name},
                                        {"clause", std::to_string(f.clause)},
                                        {"binds", f.binds.canonical(agent.mind)}},
                                       f.sources);
      for (const Effect& e : clause_effects(f)) apply_effect(sc, e, f, firing_ev);
    }
  }

  agent.ct_phase = "act";
  agent.last_tick = tick;
  result.events_logged = trace.size() - trace_before;
  return result;
}

}  // namespace cdplus
