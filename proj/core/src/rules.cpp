#include "cdplus/rules.hpp"

#include <algorithm>

namespace cdplus {

const CzId* TriggerEvent::cz_field(const std::string& name) const {
  auto it = fields.find(name);
  if (it == fields.end()) return nullptr;
  return std::get_if<CzId>(&it->second);
}

const std::string* TriggerEvent::str_field(const std::string& name) const {
  auto it = fields.find(name);
  if (it == fields.end()) return nullptr;
  return std::get_if<std::string>(&it->second);
}

namespace {

Term term_from(const SExpr& e) {
  if (e.kind == SExpr::Kind::Symbol && !e.text.empty() && e.text[0] == '?')
    return Term{true, e.text.substr(1)};
  return Term{false, e.text};
}

[[noreturn]] void bad(const SExpr& e, const std::string& msg) {
  throw ParseError(Errc::SyntaxError, msg, e.pos.line, e.pos.col);
}

Ctor ctor_from(const SExpr& e) {
  Ctor c;
  if (e.kind == SExpr::Kind::Symbol && !e.text.empty() && e.text[0] == '?') {
    c.kind = Ctor::Kind::Var;
    c.var = e.text.substr(1);
    return c;
  }
  if (e.head() == "cz") {
    c.kind = Ctor::Kind::Lit;
    c.pattern = std::make_shared<Pattern>(pattern_from_sexpr(e));
    return c;
  }
  if (e.head() == "causal") {
    c.kind = Ctor::Kind::Causal;
    if (const SExpr* m = e.kw("mods"))
      for (const SExpr& mod : m->items) c.mods = c.mods.with(*parse_mod(mod.text));
    c.sub = std::make_shared<Ctor>(ctor_from(*e.kw("cause")));
    c.sub2 = std::make_shared<Ctor>(ctor_from(*e.kw("effect")));
    return c;
  }
  if (e.head() == "mods+") {
    c.kind = Ctor::Kind::ModsPlus;
    c.sub = std::make_shared<Ctor>(ctor_from(e.items[1]));
    for (const SExpr& mod : e.items[2].items) c.mods = c.mods.with(*parse_mod(mod.text));
    return c;
  }
  if (e.head() == "neg-of") {
    c.kind = Ctor::Kind::NegOf;
    c.sub = std::make_shared<Ctor>(ctor_from(e.items[1]));
    return c;
  }
  if (e.head() == "qwhy-of") {
    c.kind = Ctor::Kind::QwhyOf;
    c.sub = std::make_shared<Ctor>(ctor_from(e.items[1]));
    return c;
  }
  if (e.head() == "completion-of") {
    c.kind = Ctor::Kind::CompletionOf;
    c.sub = std::make_shared<Ctor>(ctor_from(e.items[1]));
    return c;
  }
  if (e.head() == "elab-want") {
    c.kind = Ctor::Kind::ElabWant;
    c.var = term_from(e.items[1]).text;
    return c;
  }
  if (e.head() == "retarget-want") {
    c.kind = Ctor::Kind::RetargetWant;
    c.var = term_from(e.items[1]).text;
    c.peer = term_from(e.items[2]);
    return c;
  }
  bad(e, "unknown constructor form");
}

Trigger trigger_from(const SExpr& e) {
  Trigger t;
  if (e.head() == "on") {
    t.kind = Trigger::Kind::OnEvent;
    t.event_kind = e.items[1].text;
    for (std::size_t i = 2; i + 1 < e.items.size(); i += 2) {
      if (e.items[i].kind != SExpr::Kind::Keyword) bad(e.items[i], "expected :field value");
      t.fields.emplace_back(e.items[i].text, term_from(e.items[i + 1]));
    }
    return t;
  }
  if (e.head() == "is") {
    t.kind = Trigger::Kind::Is;
    t.var = term_from(e.items[1]).text;
    t.pattern = std::make_shared<Pattern>(pattern_from_sexpr(e.items[2]));
    return t;
  }
  if (e.head() == "haslink") {
    t.kind = Trigger::Kind::HasCausal;
    if (const SExpr* m = e.kw("mods")) {
      if (m->is_sym("any")) t.link_mods.any = true;
      else
        for (const SExpr& mod : m->items) t.link_mods.mods = t.link_mods.mods.with(*parse_mod(mod.text));
    }
    t.var = term_from(*e.kw("cause")).text;
    t.pattern = std::make_shared<Pattern>(pattern_from_sexpr(*e.kw("effect")));
    return t;
  }
  if (e.head() == "peer") {
    t.kind = Trigger::Kind::Peer;
    t.var = term_from(e.items[1]).text;
    t.attitude = e.items[2].text;
    return t;
  }
  bad(e, "unknown trigger form");
}

Guard guard_from(const SExpr& e) {
  Guard g;
  if (e.head() == "capable") {
    g.kind = Guard::Kind::Capable;
    g.text = e.items[1].text;
    return g;
  }
  if (e.head() == "not") {
    g.kind = Guard::Kind::Not;
    g.inner = std::make_shared<Guard>(guard_from(e.items[1]));
    return g;
  }
  if (e.head() == "attitude-in") {
    g.kind = Guard::Kind::AttitudeIn;
    g.var = term_from(e.items[1]).text;
    for (const SExpr& a : e.items[2].items) g.set.push_back(a.text);
    return g;
  }
  if (e.head() == "affect-any") {
    g.kind = Guard::Kind::AffectAny;
    for (const SExpr& s : e.items[1].items) g.set.push_back(s.text);
    return g;
  }
  if (e.head() == "knows-why-pleases") {
    g.kind = Guard::Kind::KnowsWhyPleases;
    g.var = term_from(e.items[1]).text;
    return g;
  }
  if (e.head() == "prosp-fulfilled-this-tick") {
    g.kind = Guard::Kind::ProspFulfilledThisTick;
    return g;
  }
  if (e.head() == "exists-peer") {
    g.kind = Guard::Kind::ExistsPeer;
    g.text = e.items[1].text;
    return g;
  }
  bad(e, "unknown guard form");
}

Effect effect_from(const SExpr& e) {
  Effect out;
  if (e.head() == "assert") {
    out.kind = Effect::Kind::Assert;
    out.ctor = ctor_from(e.items[1]);
    return out;
  }
  if (e.head() == "set-affect") {
    out.kind = Effect::Kind::SetAffect;
    out.state = e.items[1].text;
    if (!parse_state(out.state)) bad(e.items[1], "unknown state " + out.state);
    out.on = e.items[2].is_sym("on");
    if (const SExpr* obj = e.kw("object")) out.ctor = ctor_from(*obj);
    return out;
  }
  if (e.head() == "adopt-want") {
    out.kind = Effect::Kind::AdoptWant;
    out.ctor = ctor_from(e.items[1]);
    out.to = term_from(*e.kw("from"));
    return out;
  }
  if (e.head() == "invoke-planner") {
    out.kind = Effect::Kind::InvokePlanner;
    out.ctor = ctor_from(e.items[1]);
    return out;
  }
  if (e.head() == "emit") {
    out.kind = Effect::Kind::Emit;
    out.ctor = ctor_from(e.items[1]);
    out.to = term_from(*e.kw("to"));
    auto illoc = parse_illoc(e.kw("illoc")->text);
    if (!illoc) bad(e, "unknown illocution class");
    out.illoc = *illoc;
    if (const SExpr* tone = e.kw("tone"))
      out.tone = tone->text == "polite" ? Tone::Polite : Tone::Neutral;
    return out;
  }
  if (e.head() == "store-prosp") {
    out.kind = Effect::Kind::StoreProsp;
    out.ctor = ctor_from(e.items[1]);
    return out;
  }
  if (e.head() == "answer-why") {
    out.kind = Effect::Kind::AnswerWhy;
    out.var = term_from(e.items[1]).text;
    out.to = term_from(*e.kw("to"));
    return out;
  }
  if (e.head() == "record-cause") {
    out.kind = Effect::Kind::RecordCause;
    out.ctor = ctor_from(*e.kw("effect"));
    out.ctor2 = ctor_from(*e.kw("cause"));
    return out;
  }
  if (e.head() == "set-want-status") {
    out.kind = Effect::Kind::SetWantStatus;
    out.ctor = ctor_from(e.items[1]);
    out.state = e.items[2].text;
    return out;
  }
  bad(e, "unknown effect form");
}

// --- static var analysis (UnboundEffectVariable) --------------------------------

void pattern_vars(const Pattern& p, std::set<std::string>& out) {
  auto add = [&](const EntityTerm& t) {
    if (t.kind == EntityTerm::Kind::Var) out.insert(t.text);
  };
  add(p.actor);
  switch (p.object.kind) {
    case ObjectPattern::Kind::Entity: add(p.object.entity); break;
    case ObjectPattern::Kind::Cz: pattern_vars(*p.object.cz, out); break;
    case ObjectPattern::Kind::CzVar: out.insert(p.object.var); break;
    case ObjectPattern::Kind::Link: {
      auto end_vars = [&](const LinkPattern::End& end) {
        if (end.is_var) out.insert(end.var);
        else pattern_vars(*end.pat, out);
      };
      end_vars(p.object.link->cause);
      end_vars(p.object.link->effect);
      break;
    }
    case ObjectPattern::Kind::None: break;
  }
  if (p.from) add(*p.from);
  if (p.to) add(*p.to);
  if (p.instrument) add(*p.instrument);
  if (p.state && p.state->is_var) out.insert(p.state->var);
}

void ctor_vars(const Ctor& c, std::set<std::string>& out) {
  switch (c.kind) {
    case Ctor::Kind::Var:
    case Ctor::Kind::ElabWant: out.insert(c.var); break;
    case Ctor::Kind::RetargetWant:
      out.insert(c.var);
      if (c.peer.is_var) out.insert(c.peer.text);
      break;
    case Ctor::Kind::Lit: pattern_vars(*c.pattern, out); break;
    case Ctor::Kind::Causal:
      ctor_vars(*c.sub, out);
      ctor_vars(*c.sub2, out);
      break;
    default: ctor_vars(*c.sub, out); break;
  }
}

void check_clause_vars(const std::string& rule, const Clause& clause) {
  std::set<std::string> bound;
  for (const Trigger& t : clause.when) {
    switch (t.kind) {
      case Trigger::Kind::OnEvent:
        for (const auto& [field, term] : t.fields)
          if (term.is_var) bound.insert(term.text);
        break;
      case Trigger::Kind::Is:
        bound.insert(t.var);
        pattern_vars(*t.pattern, bound);
        break;
      case Trigger::Kind::HasCausal:
        bound.insert(t.var);
        pattern_vars(*t.pattern, bound);
        break;
      case Trigger::Kind::Peer: bound.insert(t.var); break;
    }
  }
  std::set<std::string> used;
  for (const Effect& e : clause.effects) {
    if (e.ctor) ctor_vars(*e.ctor, used);
    if (e.ctor2) ctor_vars(*e.ctor2, used);
    if (e.to.is_var) used.insert(e.to.text);
    if (!e.var.empty()) used.insert(e.var);
  }
  for (const std::string& v : used)
    if (!bound.count(v))
      raise(Errc::UnboundEffectVariable,
            "rule " + rule + " uses ?" + v + " in effects without binding it");
}

}  // namespace

Rulebase Rulebase::load(const CdxDocument& doc) {
  Rulebase rb;
  rb.extend(doc);
  return rb;
}

void Rulebase::extend(const CdxDocument& doc) {
  std::set<std::string> names;
  for (const Rule& r : rules_) names.insert(r.name);
  for (const SExpr& item : doc.items) {
    if (item.head() != "rule") continue;
    Rule rule;
    rule.name = item.kw("name")->text;
    rule.priority = static_cast<int>(item.kw("priority")->num);
    if (!names.insert(rule.name).second)
      raise(Errc::DuplicateRuleName, "rule " + rule.name + " defined twice");
    for (const SExpr& cl : item.kw("clauses")->items) {
      Clause clause;
      for (const SExpr& t : cl.kw("when")->items) clause.when.push_back(trigger_from(t));
      if (clause.when.empty() || clause.when[0].kind != Trigger::Kind::OnEvent)
        throw ParseError(Errc::SyntaxError, "clause must anchor on an (on ...) trigger",
                         cl.pos.line, cl.pos.col);
      if (const SExpr* g = cl.kw("guard"))
        for (const SExpr& ge : g->items) clause.guards.push_back(guard_from(ge));
      for (const SExpr& ef : cl.kw("then")->items) clause.effects.push_back(effect_from(ef));
      check_clause_vars(rule.name, clause);
      rule.clauses.push_back(std::move(clause));
    }
    rules_.push_back(std::move(rule));
  }
  std::stable_sort(rules_.begin(), rules_.end(), [](const Rule& a, const Rule& b) {
    return std::tie(a.priority, a.name) < std::tie(b.priority, b.name);
  });
}

// --- matching ---------------------------------------------------------------------------

namespace {

bool guard_holds(const Guard& g, const AgentView& view, const Bindings& binds);

bool match_event(const Trigger& t, const TriggerEvent& ev, Bindings& binds) {
  if (ev.kind != t.event_kind) return false;
  for (const auto& [field, term] : t.fields) {
    auto it = ev.fields.find(field);
    if (it == ev.fields.end()) return false;
    if (const auto* s = std::get_if<std::string>(&it->second)) {
      if (term.is_var) {
        if (!binds.bind(Sort::Entity, term.text, *s)) return false;
      } else if (term.text != *s) {
        return false;
      }
    } else if (const auto* cz = std::get_if<CzId>(&it->second)) {
      if (!term.is_var) return false;
      if (!binds.bind(Sort::Cz, term.text, *cz)) return false;
    } else {
      return false;  // int fields are payload-only
    }
  }
  return true;
}

// Enumerates conjunctive matches depth-first, left-to-right; emits each
// complete binding in deterministic order.
void enumerate(const std::vector<Trigger>& when, std::size_t idx, const AgentView& view,
               Bindings binds, std::vector<uint64_t> sources, int anchor,
               std::vector<std::tuple<Bindings, std::vector<uint64_t>, int>>& out) {
  if (idx == when.size()) {
    out.emplace_back(std::move(binds), std::move(sources), anchor);
    return;
  }
  const Trigger& t = when[idx];
  MatchContext ctx;
  ctx.self = view.self;
  switch (t.kind) {
    case Trigger::Kind::OnEvent: {
      for (std::size_t i = 0; i < view.events->size(); ++i) {
        const TriggerEvent& ev = (*view.events)[i];
        Bindings b = binds;
        if (!match_event(t, ev, b)) continue;
        auto srcs = sources;
        if (ev.source) srcs.push_back(ev.source);
        enumerate(when, idx + 1, view, std::move(b), std::move(srcs),
                  anchor < 0 ? static_cast<int>(i) : anchor, out);
      }
      return;
    }
    case Trigger::Kind::Is: {
      auto v = binds.get(Sort::Cz, t.var);
      if (!v) return;
      Bindings b = binds;
      if (!unify_into(*t.pattern, *view.store, std::get<CzId>(*v), ctx, b)) return;
      enumerate(when, idx + 1, view, std::move(b), std::move(sources), anchor, out);
      return;
    }
    case Trigger::Kind::HasCausal: {
      auto v = binds.get(Sort::Cz, t.var);
      if (!v) return;
      CzId cause = std::get<CzId>(*v);
      for (const LinkRecord& l : view.store->links()) {
        const auto* cl = std::get_if<CausalLink>(&l.kind);
        if (!cl) continue;
        if (!t.link_mods.any && !(t.link_mods.mods == l.mods)) continue;
        if (!view.store->equal(cl->cause, cause)) continue;
        Bindings b = binds;
        if (!unify_into(*t.pattern, *view.store, cl->effect, ctx, b)) continue;
        enumerate(when, idx + 1, view, std::move(b), sources, anchor, out);
      }
      return;
    }
    case Trigger::Kind::Peer: {
      for (const std::string& peer : *view.peers) {
        auto it = view.attitudes->find({peer, view.self});
        if (it == view.attitudes->end() || it->second != t.attitude) continue;
        Bindings b = binds;
        if (!b.bind(Sort::Entity, t.var, peer)) continue;
        enumerate(when, idx + 1, view, std::move(b), sources, anchor, out);
      }
      return;
    }
  }
}

bool guard_holds(const Guard& g, const AgentView& view, const Bindings& binds) {
  switch (g.kind) {
    case Guard::Kind::Capable: {
      auto it = view.capabilities->find(g.text);
      return it != view.capabilities->end() && it->second;
    }
    case Guard::Kind::Not: return !guard_holds(*g.inner, view, binds);
    case Guard::Kind::AttitudeIn: {
      auto who = binds.get(Sort::Entity, g.var);
      if (!who) return false;
      auto it = view.attitudes->find({view.self, std::get<std::string>(*who)});
      if (it == view.attitudes->end()) return false;
      return std::find(g.set.begin(), g.set.end(), it->second) != g.set.end();
    }
    case Guard::Kind::AffectAny: {
      for (const ActiveAffect& a : *view.affects)
        for (const std::string& s : g.set)
          if (parse_state(s) && *parse_state(s) == a.state) return true;
      return false;
    }
    case Guard::Kind::KnowsWhyPleases: {
      auto who = binds.get(Sort::Entity, g.var);
      if (!who) return false;
      return view.knowledge->count("why-answer-pleases " + std::get<std::string>(*who)) > 0;
    }
    case Guard::Kind::ProspFulfilledThisTick: {
      for (const TriggerEvent& ev : *view.events)
        if (ev.kind == "prosp-fulfilled") return true;
      return false;
    }
    case Guard::Kind::ExistsPeer: {
      for (const std::string& peer : *view.peers) {
        auto it = view.attitudes->find({peer, view.self});
        if (it != view.attitudes->end() && it->second == g.text) return true;
      }
      return false;
    }
  }
  return false;
}

}  // namespace

std::vector<Firing> fire_cycle(const Rulebase& rb, const AgentView& view,
                               RefractoryState& refractory) {
  std::vector<Firing> out;
  for (const Rule& rule : rb.rules()) {
    for (std::size_t ci = 0; ci < rule.clauses.size(); ++ci) {
      const Clause& clause = rule.clauses[ci];
      std::vector<std::tuple<Bindings, std::vector<uint64_t>, int>> matches;
      enumerate(clause.when, 0, view, Bindings{}, {}, -1, matches);
      for (auto& [binds, sources, anchor] : matches) {
        std::string commit_key = rule.name + "#" + std::to_string(anchor);
        if (refractory.committed.count(commit_key)) continue;
        bool ok = true;
        for (const Guard& g : clause.guards)
          if (!guard_holds(g, view, binds)) {
            ok = false;
            break;
          }
        if (!ok) continue;
        std::string fire_key = rule.name + "|" + binds.canonical(*view.store);
        if (refractory.fired.count(fire_key)) continue;
        refractory.fired.insert(fire_key);
        refractory.committed.insert(commit_key);
        out.push_back(Firing{&rule, static_cast<int>(ci), std::move(binds), std::move(sources)});
      }
    }
  }
  return out;
}

const std::vector<Effect>& clause_effects(const Firing& f) {
  return f.rule->clauses[f.clause].effects;
}

}  // namespace cdplus
