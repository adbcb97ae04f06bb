#include "cdplus/cdx.hpp"

#include <algorithm>
#include <set>

namespace cdplus {

namespace {

constexpr std::size_t kWrapCol = 100;

const std::set<std::string>& attitude_names() {
  static const std::set<std::string> names = {"SERVILE", "ALTRUISTIC", "COOPERATIVE",
                                              "REBELLIOUS", "UNCOOPERATIVE"};
  return names;
}

struct Ctx {
  bool lenient = false;
  std::vector<Diagnostic>* diags = nullptr;
  std::set<std::string> labels;  // declared so far, document order

  [[noreturn]] void hard(Errc c, const std::string& msg, SourcePos p) const {
    throw ParseError(c, msg, p.line, p.col);
  }

  void soft(Errc c, const std::string& msg, SourcePos p) {
    if (lenient && diags) {
      diags->push_back(Diagnostic{c, msg, p});
    } else {
      hard(c, msg, p);
    }
  }
};

bool is_bool_sym(const SExpr& e) {
  return e.kind == SExpr::Kind::Symbol && (e.text == "true" || e.text == "false");
}

bool is_var(const SExpr& e) {
  return e.is_list() && e.items.size() == 2 && e.items[0].kind == SExpr::Kind::Symbol &&
         !e.items[0].text.empty() && e.items[0].text[0] == '?';
}

bool is_context_atom(const SExpr& e) {
  return e.kind == SExpr::Kind::Symbol && !e.text.empty() && e.text[0] == '@';
}

SExpr check_var(const SExpr& e, Ctx& ctx, const char* wanted_sort) {
  const std::string& sort = e.items[1].kind == SExpr::Kind::Symbol ? e.items[1].text : "";
  if (sort != "entity" && sort != "cz" && sort != "state")
    ctx.hard(Errc::SyntaxError, "variable sort must be entity, cz or state", e.pos);
  if (wanted_sort && sort != wanted_sort)
    ctx.hard(Errc::SortMismatch,
             "variable " + e.items[0].text + " has sort " + sort + ", expected " + wanted_sort,
             e.pos);
  return e;
}

SExpr norm_entity_atom(const SExpr& e, Ctx& ctx, bool pattern) {
  if (e.kind == SExpr::Kind::Symbol) {
    if (e.text[0] == '?') ctx.hard(Errc::SyntaxError, "bare ? symbol; write (?name sort)", e.pos);
    if (is_context_atom(e) || e.text == "self") {
      if (!pattern) ctx.hard(Errc::SyntaxError, "context atoms only allowed in patterns", e.pos);
    }
    return e;
  }
  if (pattern && is_var(e)) return check_var(e, ctx, "entity");
  ctx.hard(Errc::SyntaxError, "expected an entity", e.pos);
}

SExpr norm_mods(const SExpr& e, Ctx& ctx, bool pattern) {
  if (e.is_sym("any")) {
    if (!pattern) ctx.hard(Errc::SyntaxError, ":mods any is only allowed in patterns", e.pos);
    return e;
  }
  if (!e.is_list()) ctx.hard(Errc::SyntaxError, ":mods expects a list", e.pos);
  std::set<int> seen;
  bool has_f = false, has_past = false;
  for (const SExpr& m : e.items) {
    if (m.kind != SExpr::Kind::Symbol) ctx.hard(Errc::SyntaxError, "bad modifier", m.pos);
    auto mod = parse_mod(m.text);
    if (!mod) ctx.hard(Errc::SyntaxError, "unknown modifier " + m.text, m.pos);
    if (*mod == Mod::F) has_f = true;
    if (*mod == Mod::Past) has_past = true;
    seen.insert(static_cast<int>(*mod));
  }
  if (has_f && has_past)
    ctx.hard(Errc::SyntaxError, "modifiers f and past are mutually exclusive", e.pos);
  SExpr out = SExpr::list({});
  out.pos = e.pos;
  for (int i = 0; i < 6; ++i)
    if (seen.count(i)) out.items.push_back(SExpr::symbol(mod_name(static_cast<Mod>(i))));
  return out;
}

SExpr norm_state(const SExpr& e, Ctx& ctx, bool pattern) {
  if (e.kind == SExpr::Kind::Symbol) {
    if (!parse_state(e.text)) ctx.hard(Errc::UnknownState, "unknown state " + e.text, e.pos);
    return e;
  }
  if (pattern && is_var(e)) return check_var(e, ctx, "state");
  if (e.is_list() && !e.items.empty() && e.items[0].kind == SExpr::Kind::Symbol) {
    if (!parse_state(e.items[0].text))
      ctx.hard(Errc::UnknownState, "unknown state " + e.items[0].text, e.pos);
    const SExpr* anchor = e.kw("anchor");
    if (!anchor || anchor->kind != SExpr::Kind::Symbol)
      ctx.hard(Errc::SyntaxError, "state form expects :anchor <id>", e.pos);
    SExpr out = SExpr::list({e.items[0], SExpr::keyword("anchor"), *anchor});
    out.pos = e.pos;
    return out;
  }
  ctx.hard(Errc::SyntaxError, "bad state", e.pos);
}

SExpr norm_cz(const SExpr& form, Ctx& ctx, bool pattern, bool nested = false);

SExpr norm_causal(const SExpr& form, Ctx& ctx, bool pattern) {
  SExpr out = SExpr::list({SExpr::symbol("causal")});
  out.pos = form.pos;
  if (const SExpr* mods = form.kw("mods")) {
    out.items.push_back(SExpr::keyword("mods"));
    out.items.push_back(norm_mods(*mods, ctx, pattern));
  }
  for (const char* key : {"cause", "effect"}) {
    const SExpr* v = form.kw(key);
    if (!v) ctx.hard(Errc::SyntaxError, std::string("causal needs :") + key, form.pos);
    out.items.push_back(SExpr::keyword(key));
    if (v->kind == SExpr::Kind::LabelRef) {
      if (pattern) ctx.hard(Errc::SyntaxError, "label refs are not allowed in patterns", v->pos);
      if (!ctx.labels.count(v->text))
        ctx.soft(Errc::DanglingLabelRef, "label " + v->text + " is not declared", v->pos);
      out.items.push_back(*v);
    } else if (v->head() == "cz") {
      out.items.push_back(norm_cz(*v, ctx, pattern));
    } else if (pattern && is_var(*v)) {
      out.items.push_back(check_var(*v, ctx, "cz"));
    } else {
      ctx.hard(Errc::SyntaxError, "causal endpoints are label refs or cz forms", v->pos);
    }
  }
  return out;
}

SExpr norm_cz(const SExpr& form, Ctx& ctx, bool pattern, bool nested) {
  SExpr out = SExpr::list({SExpr::symbol("cz")});
  out.pos = form.pos;

  for (std::size_t i = 1; i < form.items.size(); i += 2) {
    if (form.items[i].kind != SExpr::Kind::Keyword || i + 1 >= form.items.size())
      ctx.hard(Errc::SyntaxError, "cz expects :keyword value pairs", form.items[i].pos);
    static const std::set<std::string> known = {"label", "actor", "act", "obj",  "from",
                                                "to",    "inst",  "state", "mods"};
    if (!known.count(form.items[i].text))
      ctx.hard(Errc::SyntaxError, "unknown cz field :" + form.items[i].text, form.items[i].pos);
  }

  if (const SExpr* label = form.kw("label")) {
    if (pattern) ctx.hard(Errc::SyntaxError, "labels are not allowed in patterns", label->pos);
    if (label->kind != SExpr::Kind::String)
      ctx.hard(Errc::SyntaxError, ":label expects a string", label->pos);
    if (!ctx.labels.insert(label->text).second)
      ctx.soft(Errc::LabelClash, "duplicate label " + label->text, label->pos);
    out.items.push_back(SExpr::keyword("label"));
    out.items.push_back(*label);
  }

  const SExpr* actor = form.kw("actor");
  if (!actor) ctx.hard(Errc::SyntaxError, "cz needs :actor", form.pos);
  out.items.push_back(SExpr::keyword("actor"));
  out.items.push_back(norm_entity_atom(*actor, ctx, pattern));

  const SExpr* act = form.kw("act");
  if (!act) ctx.hard(Errc::SyntaxError, "cz needs :act", form.pos);
  if (act->kind != SExpr::Kind::Symbol || !parse_act(act->text))
    ctx.hard(Errc::UnknownAct,
             "unknown act " + (act->kind == SExpr::Kind::Symbol ? act->text : "<non-symbol>"),
             act->pos);
  out.items.push_back(SExpr::keyword("act"));
  out.items.push_back(*act);

  const std::string& act_name_text = act->text;
  const bool needs_cz_object = act_name_text == "CONCP" || act_name_text == "ANTICIPATE";
  const bool quoting =
      act_name_text == "MTRANS" || act_name_text == "MBUILD" || act_name_text == "SAY";
  if (const SExpr* obj = form.kw("obj")) {
    out.items.push_back(SExpr::keyword("obj"));
    if (obj->kind == SExpr::Kind::LabelRef) {
      if (pattern) ctx.hard(Errc::SyntaxError, "label refs are not allowed in patterns", obj->pos);
      if (!ctx.labels.count(obj->text))
        ctx.soft(Errc::DanglingLabelRef, "label " + obj->text + " is not declared", obj->pos);
      out.items.push_back(*obj);
    } else if (obj->head() == "cz") {
      out.items.push_back(norm_cz(*obj, ctx, pattern, !quoting));
    } else if (obj->head() == "causal") {
      out.items.push_back(norm_causal(*obj, ctx, pattern));
    } else if (pattern && is_var(*obj)) {
      // object variables may range over entities or czs
      out.items.push_back(check_var(*obj, ctx, nullptr));
    } else {
      if (needs_cz_object && !pattern)
        ctx.hard(Errc::SyntaxError, act_name_text + " requires a conceptualization object",
                 obj->pos);
      out.items.push_back(norm_entity_atom(*obj, ctx, pattern));
    }
  }

  for (const char* key : {"from", "to", "inst"}) {
    if (const SExpr* v = form.kw(key)) {
      out.items.push_back(SExpr::keyword(key));
      out.items.push_back(norm_entity_atom(*v, ctx, pattern));
    }
  }

  if (const SExpr* st = form.kw("state")) {
    out.items.push_back(SExpr::keyword("state"));
    out.items.push_back(norm_state(*st, ctx, pattern));
  }

  if (const SExpr* mods = form.kw("mods")) {
    SExpr n = norm_mods(*mods, ctx, pattern);
    // quoting acts (MTRANS/MBUILD/SAY) are exempt from the nesting rule,
    // which the store enforces; here we only reject the clear-cut cases
    if (nested && !n.is_sym("any"))
      for (const SExpr& m : n.items)
        if (m.is_sym("qwhy"))
          ctx.hard(Errc::SyntaxError, "qwhy is only allowed on top-level conceptualizations",
                   mods->pos);
    if (n.is_sym("any") || !n.items.empty()) {
      out.items.push_back(SExpr::keyword("mods"));
      out.items.push_back(n);
    }
  }
  return out;
}

SExpr norm_ref(const SExpr& e, Ctx& ctx) {
  if (e.kind == SExpr::Kind::LabelRef) {
    if (!ctx.labels.count(e.text))
      ctx.soft(Errc::DanglingLabelRef, "label " + e.text + " is not declared", e.pos);
    return e;
  }
  if (e.head() == "cz") return norm_cz(e, ctx, false);
  ctx.hard(Errc::SyntaxError, "expected a label reference or cz form", e.pos);
}

// Recursively normalizes embedded cz/causal forms inside rule bodies, leaving
// engine forms (on/guards/effects) untouched otherwise.
SExpr norm_rule_body(const SExpr& e, Ctx& ctx) {
  if (!e.is_list()) return e;
  if (e.head() == "cz") return norm_cz(e, ctx, true);
  if (e.head() == "causal") return norm_causal(e, ctx, true);
  SExpr out = e;
  for (auto& item : out.items) item = norm_rule_body(item, ctx);
  return out;
}

SExpr norm_clause(const SExpr& form, Ctx& ctx) {
  SExpr out = SExpr::list({SExpr::symbol("clause")});
  out.pos = form.pos;
  const SExpr* when = form.kw("when");
  if (!when || !when->is_list()) ctx.hard(Errc::SyntaxError, "clause needs :when (...)", form.pos);
  out.items.push_back(SExpr::keyword("when"));
  out.items.push_back(norm_rule_body(*when, ctx));
  if (const SExpr* guard = form.kw("guard")) {
    if (!guard->is_list()) ctx.hard(Errc::SyntaxError, ":guard expects a list", guard->pos);
    if (!guard->items.empty()) {
      out.items.push_back(SExpr::keyword("guard"));
      out.items.push_back(norm_rule_body(*guard, ctx));
    }
  }
  const SExpr* then = form.kw("then");
  if (!then || !then->is_list()) ctx.hard(Errc::SyntaxError, "clause needs :then (...)", form.pos);
  out.items.push_back(SExpr::keyword("then"));
  out.items.push_back(norm_rule_body(*then, ctx));
  return out;
}

SExpr norm_rule(const SExpr& form, Ctx& ctx) {
  SExpr out = SExpr::list({SExpr::symbol("rule")});
  out.pos = form.pos;
  const SExpr* name = form.kw("name");
  if (!name || name->kind != SExpr::Kind::String)
    ctx.hard(Errc::SyntaxError, "rule needs :name \"...\"", form.pos);
  const SExpr* prio = form.kw("priority");
  if (!prio || prio->kind != SExpr::Kind::Int)
    ctx.hard(Errc::SyntaxError, "rule needs integer :priority", form.pos);
  out.items.push_back(SExpr::keyword("name"));
  out.items.push_back(*name);
  out.items.push_back(SExpr::keyword("priority"));
  out.items.push_back(*prio);

  SExpr clauses = SExpr::list({});
  if (const SExpr* cl = form.kw("clauses")) {
    if (!cl->is_list()) ctx.hard(Errc::SyntaxError, ":clauses expects a list", cl->pos);
    for (const SExpr& c : cl->items) {
      if (c.head() != "clause") ctx.hard(Errc::SyntaxError, "expected (clause ...)", c.pos);
      clauses.items.push_back(norm_clause(c, ctx));
    }
  } else {
    // Shorthand: single clause spelled with :when/:guard/:then at rule level.
    SExpr c = SExpr::list({SExpr::symbol("clause")});
    c.pos = form.pos;
    for (const char* key : {"when", "guard", "then"}) {
      if (const SExpr* v = form.kw(key)) {
        c.items.push_back(SExpr::keyword(key));
        c.items.push_back(*v);
      }
    }
    clauses.items.push_back(norm_clause(c, ctx));
  }
  if (clauses.items.empty()) ctx.hard(Errc::SyntaxError, "rule has no clauses", form.pos);
  out.items.push_back(SExpr::keyword("clauses"));
  out.items.push_back(std::move(clauses));
  return out;
}

SExpr norm_template(const SExpr& form, Ctx& ctx) {
  SExpr out = SExpr::list({SExpr::symbol("template")});
  out.pos = form.pos;
  const SExpr* id = form.kw("id");
  if (!id || id->kind != SExpr::Kind::Symbol)
    ctx.hard(Errc::SyntaxError, "template needs :id", form.pos);
  const SExpr* illoc = form.kw("illoc");
  static const std::set<std::string> illocs = {"directive", "inform", "why-question", "answer"};
  if (!illoc || illoc->kind != SExpr::Kind::Symbol || !illocs.count(illoc->text))
    ctx.hard(Errc::SyntaxError, "template needs :illoc directive|inform|why-question|answer",
             form.pos);
  out.items.push_back(SExpr::keyword("id"));
  out.items.push_back(*id);
  out.items.push_back(SExpr::keyword("illoc"));
  out.items.push_back(*illoc);
  if (const SExpr* tone = form.kw("tone")) {
    if (tone->kind != SExpr::Kind::Symbol || (tone->text != "polite" && tone->text != "neutral"))
      ctx.hard(Errc::SyntaxError, ":tone is polite or neutral", tone->pos);
    out.items.push_back(SExpr::keyword("tone"));
    out.items.push_back(*tone);
  }
  const SExpr* pattern = form.kw("pattern");
  if (!pattern || pattern->head() != "cz")
    ctx.hard(Errc::SyntaxError, "template needs :pattern (cz ...)", form.pos);
  out.items.push_back(SExpr::keyword("pattern"));
  out.items.push_back(norm_cz(*pattern, ctx, true));
  const SExpr* text = form.kw("text");
  if (!text || text->kind != SExpr::Kind::String)
    ctx.hard(Errc::SyntaxError, "template needs :text \"...\"", form.pos);
  out.items.push_back(SExpr::keyword("text"));
  out.items.push_back(*text);
  return out;
}

SExpr norm_pairs_list(const SExpr& e, Ctx& ctx, const char* what,
                      const std::set<std::string>* second_domain) {
  if (!e.is_list()) ctx.hard(Errc::SyntaxError, std::string(what) + " expects a list", e.pos);
  SExpr out = SExpr::list({});
  out.pos = e.pos;
  for (const SExpr& p : e.items) {
    if (!p.is_list() || p.items.size() != 2 || p.items[0].kind != SExpr::Kind::Symbol ||
        p.items[1].kind != SExpr::Kind::Symbol)
      ctx.hard(Errc::SyntaxError, std::string(what) + " entries are (Sym Sym) pairs", p.pos);
    if (second_domain && !second_domain->count(p.items[1].text))
      ctx.hard(Errc::SyntaxError, "unknown value " + p.items[1].text, p.items[1].pos);
    out.items.push_back(p);
  }
  return out;
}

SExpr norm_top(const SExpr& form, Ctx& ctx) {
  if (!form.is_list() || form.head().empty())
    ctx.hard(Errc::SyntaxError, "expected a (form ...)", form.pos);
  std::string_view head = form.head();

  if (head == "cz") return norm_cz(form, ctx, false);
  if (head == "causal") return norm_causal(form, ctx, false);

  if (head == "temporal") {
    SExpr out = SExpr::list({SExpr::symbol("temporal")});
    out.pos = form.pos;
    for (const char* key : {"before", "after"}) {
      const SExpr* v = form.kw(key);
      if (!v) ctx.hard(Errc::SyntaxError, std::string("temporal needs :") + key, form.pos);
      out.items.push_back(SExpr::keyword(key));
      out.items.push_back(norm_ref(*v, ctx));
    }
    return out;
  }

  if (head == "state-attr") {
    SExpr out = SExpr::list({SExpr::symbol("state-attr")});
    out.pos = form.pos;
    const SExpr* entity = form.kw("entity");
    if (!entity) ctx.hard(Errc::SyntaxError, "state-attr needs :entity", form.pos);
    out.items.push_back(SExpr::keyword("entity"));
    out.items.push_back(norm_entity_atom(*entity, ctx, false));
    const SExpr* st = form.kw("state");
    if (!st) ctx.hard(Errc::SyntaxError, "state-attr needs :state", form.pos);
    out.items.push_back(SExpr::keyword("state"));
    out.items.push_back(norm_state(*st, ctx, false));
    const SExpr* czref = form.kw("cz");
    if (!czref) ctx.hard(Errc::SyntaxError, "state-attr needs :cz", form.pos);
    out.items.push_back(SExpr::keyword("cz"));
    out.items.push_back(norm_ref(*czref, ctx));
    return out;
  }

  if (head == "elab") {
    if (form.items.size() < 2 || form.items[1].kind != SExpr::Kind::Symbol)
      ctx.hard(Errc::SyntaxError, "elab needs a symbol", form.pos);
    const std::string& sym = form.items[1].text;
    if (!parse_act(sym) && !parse_state(sym))
      ctx.hard(Errc::UnknownAct, "unknown act/state symbol " + sym, form.items[1].pos);
    const SExpr* script = form.kw("script");
    if (!script || !script->is_list() || script->items.empty())
      ctx.hard(Errc::SyntaxError, "elab needs nonempty :script (...)", form.pos);
    SExpr out = SExpr::list({SExpr::symbol("elab"), form.items[1], SExpr::keyword("script")});
    out.pos = form.pos;
    SExpr steps = SExpr::list({});
    for (const SExpr& s : script->items) steps.items.push_back(norm_ref(s, ctx));
    out.items.push_back(std::move(steps));
    return out;
  }

  if (head == "anchor") {
    if (form.items.size() < 3 || form.items[1].kind != SExpr::Kind::Symbol ||
        form.items[2].kind != SExpr::Kind::Symbol)
      ctx.hard(Errc::SyntaxError, "anchor needs (anchor Symbol anchor-id)", form.pos);
    SExpr out = SExpr::list({SExpr::symbol("anchor"), form.items[1], form.items[2]});
    out.pos = form.pos;
    if (const SExpr* uri = form.kw("uri")) {
      if (uri->kind != SExpr::Kind::String) ctx.hard(Errc::SyntaxError, ":uri is a string", uri->pos);
      out.items.push_back(SExpr::keyword("uri"));
      out.items.push_back(*uri);
    }
    return out;
  }

  if (head == "rule") return norm_rule(form, ctx);
  if (head == "template") return norm_template(form, ctx);

  if (head == "lexeme") {
    if (form.items.size() != 3 || form.items[1].kind != SExpr::Kind::Symbol ||
        form.items[2].kind != SExpr::Kind::String)
      ctx.hard(Errc::SyntaxError, "lexeme needs (lexeme Entity \"word\")", form.pos);
    return form;
  }

  if (head == "scenario") {
    SExpr out = SExpr::list({SExpr::symbol("scenario")});
    out.pos = form.pos;
    const SExpr* name = form.kw("name");
    if (!name || name->kind != SExpr::Kind::Symbol)
      ctx.hard(Errc::SyntaxError, "scenario needs :name", form.pos);
    out.items.push_back(SExpr::keyword("name"));
    out.items.push_back(*name);
    const SExpr* order = form.kw("turn-order");
    if (!order || !order->is_list())
      ctx.hard(Errc::SyntaxError, "scenario needs :turn-order (...)", form.pos);
    out.items.push_back(SExpr::keyword("turn-order"));
    out.items.push_back(*order);
    const SExpr* ticks = form.kw("max-ticks");
    if (!ticks || ticks->kind != SExpr::Kind::Int)
      ctx.hard(Errc::SyntaxError, "scenario needs integer :max-ticks", form.pos);
    out.items.push_back(SExpr::keyword("max-ticks"));
    out.items.push_back(*ticks);
    return out;
  }

  if (head == "world") {
    SExpr out = SExpr::list({SExpr::symbol("world")});
    out.pos = form.pos;
    const SExpr* locs = form.kw("locations");
    if (!locs || !locs->is_list()) ctx.hard(Errc::SyntaxError, "world needs :locations", form.pos);
    out.items.push_back(SExpr::keyword("locations"));
    out.items.push_back(*locs);
    const SExpr* at = form.kw("at");
    if (!at) ctx.hard(Errc::SyntaxError, "world needs :at", form.pos);
    out.items.push_back(SExpr::keyword("at"));
    out.items.push_back(norm_pairs_list(*at, ctx, ":at", nullptr));
    if (const SExpr* holding = form.kw("holding")) {
      out.items.push_back(SExpr::keyword("holding"));
      out.items.push_back(*holding);
    }
    return out;
  }

  if (head == "agent") {
    SExpr out = SExpr::list({SExpr::symbol("agent")});
    out.pos = form.pos;
    const SExpr* name = form.kw("name");
    if (!name || name->kind != SExpr::Kind::Symbol)
      ctx.hard(Errc::SyntaxError, "agent needs :name", form.pos);
    out.items.push_back(SExpr::keyword("name"));
    out.items.push_back(*name);
    if (const SExpr* caps = form.kw("capabilities")) {
      if (!caps->is_list()) ctx.hard(Errc::SyntaxError, ":capabilities expects a list", caps->pos);
      for (const SExpr& c : caps->items)
        if (!c.is_list() || c.items.size() != 2 || c.items[0].kind != SExpr::Kind::Symbol ||
            !is_bool_sym(c.items[1]))
          ctx.hard(Errc::SyntaxError, "capability entries are (flag true|false)", c.pos);
      out.items.push_back(SExpr::keyword("capabilities"));
      out.items.push_back(*caps);
    }
    if (const SExpr* att = form.kw("attitudes")) {
      out.items.push_back(SExpr::keyword("attitudes"));
      out.items.push_back(norm_pairs_list(*att, ctx, ":attitudes", &attitude_names()));
    }
    if (const SExpr* wants = form.kw("wants")) {
      if (!wants->is_list()) ctx.hard(Errc::SyntaxError, ":wants expects a list", wants->pos);
      SExpr lst = SExpr::list({});
      for (const SExpr& w : wants->items) lst.items.push_back(norm_ref(w, ctx));
      out.items.push_back(SExpr::keyword("wants"));
      out.items.push_back(std::move(lst));
    }
    if (const SExpr* knowledge = form.kw("knowledge")) {
      if (!knowledge->is_list()) ctx.hard(Errc::SyntaxError, ":knowledge expects a list", knowledge->pos);
      out.items.push_back(SExpr::keyword("knowledge"));
      out.items.push_back(*knowledge);
    }
    if (const SExpr* models = form.kw("models")) {
      if (!models->is_list()) ctx.hard(Errc::SyntaxError, ":models expects a list", models->pos);
      out.items.push_back(SExpr::keyword("models"));
      out.items.push_back(*models);
    }
    return out;
  }

  ctx.hard(Errc::SyntaxError, "unknown form " + std::string(head), form.pos);
}

// --- pretty printer -----------------------------------------------------------

void pretty(const SExpr& e, std::string& out, std::size_t indent);

bool fits_inline(const SExpr& e, std::size_t indent) {
  return indent + write_sexpr(e).size() <= kWrapCol;
}

void pretty(const SExpr& e, std::string& out, std::size_t indent) {
  if (e.kind != SExpr::Kind::List || fits_inline(e, indent)) {
    out += write_sexpr(e);
    return;
  }
  out += '(';
  std::size_t inner = indent + 2;
  bool first = true;
  std::size_t i = 0;
  while (i < e.items.size()) {
    bool pair = e.items[i].kind == SExpr::Kind::Keyword && i + 1 < e.items.size();
    if (first) {
      first = false;
    } else {
      out += '\n';
      out.append(inner, ' ');
    }
    if (pair) {
      out += write_sexpr(e.items[i]);
      out += ' ';
      pretty(e.items[i + 1], out, inner + e.items[i].text.size() + 2);
      i += 2;
    } else {
      pretty(e.items[i], out, inner);
      i += 1;
    }
  }
  out += ')';
}

}  // namespace

bool CdxDocument::operator==(const CdxDocument& other) const {
  return serialize(*this) == serialize(other);
}

CdxDocument parse(std::string_view text) {
  Ctx ctx;
  CdxDocument doc;
  for (const SExpr& form : parse_sexprs(text)) doc.items.push_back(norm_top(form, ctx));
  return doc;
}

std::string serialize(const CdxDocument& doc) {
  std::string out;
  for (std::size_t i = 0; i < doc.items.size(); ++i) {
    if (i) out += '\n';
    pretty(doc.items[i], out, 0);
    out += '\n';
  }
  return out;
}

std::vector<Diagnostic> validate(std::string_view text) {
  std::vector<Diagnostic> diags;
  Ctx ctx;
  ctx.lenient = true;
  ctx.diags = &diags;
  CdxDocument doc;
  for (const SExpr& form : parse_sexprs(text)) doc.items.push_back(norm_top(form, ctx));

  // Grounding pass: build what we can and run ground_check per top-level cz.
  Store store;
  DocBuild build;
  for (const SExpr& item : doc.items) {
    try {
      build_item(store, item, build, true);
    } catch (const Error& e) {
      diags.push_back(Diagnostic{e.code(), e.what(), item.pos});
    }
  }
  std::set<std::string> seen;
  for (CzId root : build.top_czs) {
    try {
      for (const std::string& sym : store.ground_check(root))
        if (seen.insert(sym).second)
          diags.push_back(Diagnostic{Errc::Ungrounded, "ungrounded symbol " + sym, {}});
    } catch (const Error& e) {
      diags.push_back(Diagnostic{e.code(), e.what(), {}});
    }
  }
  return diags;
}

// --- store building ----------------------------------------------------------------

namespace {

StateRef state_from(const SExpr& e) {
  if (e.kind == SExpr::Kind::Symbol) return StateRef{*parse_state(e.text), std::nullopt};
  StateRef r{*parse_state(e.items[0].text), std::nullopt};
  if (const SExpr* anchor = e.kw("anchor")) r.anchor = anchor->text;
  return r;
}

ModSet mods_from(const SExpr& e) {
  ModSet out;
  for (const SExpr& m : e.items) out = out.with(*parse_mod(m.text));
  return out;
}

CzId resolve_ref(Store& store, const SExpr& e, std::map<std::string, CzId>& labels, bool fresh) {
  if (e.kind == SExpr::Kind::LabelRef) {
    auto it = labels.find(e.text);
    if (it == labels.end()) raise(Errc::DanglingLabelRef, "label " + e.text + " is not declared");
    return it->second;
  }
  return build_cz(store, e, labels, fresh);
}

}  // namespace

CzId build_cz(Store& store, const SExpr& form, std::map<std::string, CzId>& labels, bool fresh) {
  CzSpec spec;
  if (const SExpr* label = form.kw("label")) spec.label = label->text;
  spec.actor = store.intern_from_text(form.kw("actor")->text);
  spec.act = *parse_act(form.kw("act")->text);
  if (const SExpr* obj = form.kw("obj")) {
    if (obj->kind == SExpr::Kind::LabelRef) {
      spec.object = resolve_ref(store, *obj, labels, fresh);
    } else if (obj->head() == "cz") {
      spec.object = build_cz(store, *obj, labels, fresh);
    } else if (obj->head() == "causal") {
      CzId cause = resolve_ref(store, *obj->kw("cause"), labels, fresh);
      CzId effect = resolve_ref(store, *obj->kw("effect"), labels, fresh);
      ModSet mods;
      if (const SExpr* m = obj->kw("mods")) mods = mods_from(*m);
      spec.object = store.find_or_link(CausalLink{cause, effect}, mods);
    } else {
      spec.object = store.intern_from_text(obj->text);
    }
  }
  if (const SExpr* v = form.kw("from")) spec.from = store.intern_from_text(v->text);
  if (const SExpr* v = form.kw("to")) spec.to = store.intern_from_text(v->text);
  if (const SExpr* v = form.kw("inst")) spec.instrument = store.intern_from_text(v->text);
  if (const SExpr* v = form.kw("state")) spec.state = state_from(*v);
  if (const SExpr* v = form.kw("mods")) spec.mods = mods_from(*v);

  CzId id = fresh ? store.assert_cz(spec) : store.find_or_assert(spec);
  if (spec.label) labels[*spec.label] = id;
  return id;
}

void build_item(Store& store, const SExpr& item, DocBuild& out, bool fresh_czs) {
  std::string_view head = item.head();
  if (head == "cz") {
    out.top_czs.push_back(build_cz(store, item, out.labels, fresh_czs));
  } else if (head == "causal") {
    CzId cause = resolve_ref(store, *item.kw("cause"), out.labels, fresh_czs);
    CzId effect = resolve_ref(store, *item.kw("effect"), out.labels, fresh_czs);
    ModSet mods;
    if (const SExpr* m = item.kw("mods")) mods = mods_from(*m);
    out.links.push_back(store.add_link(CausalLink{cause, effect}, mods));
  } else if (head == "temporal") {
    CzId before = resolve_ref(store, *item.kw("before"), out.labels, fresh_czs);
    CzId after = resolve_ref(store, *item.kw("after"), out.labels, fresh_czs);
    out.links.push_back(store.add_link(TemporalLink{before, after}));
  } else if (head == "state-attr") {
    StateAttrLink l{store.intern_from_text(item.kw("entity")->text),
                    state_from(*item.kw("state")),
                    resolve_ref(store, *item.kw("cz"), out.labels, fresh_czs)};
    out.links.push_back(store.add_link(l));
  } else if (head == "elab") {
    Elaboration e;
    const std::string& sym = item.items[1].text;
    if (auto a = parse_act(sym)) e.symbol = *a;
    else e.symbol = *parse_state(sym);
    for (const SExpr& step : item.kw("script")->items)
      e.script.push_back(resolve_ref(store, step, out.labels, fresh_czs));
    store.add_elaboration(std::move(e));
  } else if (head == "anchor") {
    const std::string& sym = item.items[1].text;
    StructureAnchor sa{item.items[2].text, {}};
    if (const SExpr* uri = item.kw("uri")) sa.uri = uri->text;
    if (auto a = parse_act(sym)) store.anchor_act(*a, std::move(sa));
    else if (auto s = parse_state(sym)) store.anchor_state(*s, std::move(sa));
    else store.set_entity_anchor(store.intern_from_text(sym), sa.id);
  }
  // rule/template/lexeme/scenario/world/agent are loaded by their own modules
}

DocBuild build_into_store(const CdxDocument& doc, Store& store, bool fresh_czs) {
  DocBuild out;
  for (const SExpr& item : doc.items) build_item(store, item, out, fresh_czs);
  return out;
}

// --- wire helpers ----------------------------------------------------------------------

SExpr cz_to_sexpr(const Store& store, CzId id) {
  const Conceptualization& c = store.cz(id);
  SExpr out = SExpr::list({SExpr::symbol("cz")});
  out.items.push_back(SExpr::keyword("actor"));
  out.items.push_back(SExpr::symbol(store.entity_data(c.actor).text()));
  out.items.push_back(SExpr::keyword("act"));
  out.items.push_back(SExpr::symbol(act_name(c.act)));
  if (std::holds_alternative<EntityId>(c.object)) {
    out.items.push_back(SExpr::keyword("obj"));
    out.items.push_back(SExpr::symbol(store.entity_data(std::get<EntityId>(c.object)).text()));
  } else if (std::holds_alternative<CzId>(c.object)) {
    out.items.push_back(SExpr::keyword("obj"));
    out.items.push_back(cz_to_sexpr(store, std::get<CzId>(c.object)));
  } else if (std::holds_alternative<LinkId>(c.object)) {
    const LinkRecord& l = store.link(std::get<LinkId>(c.object));
    const auto& cl = std::get<CausalLink>(l.kind);
    SExpr link = SExpr::list({SExpr::symbol("causal")});
    if (!l.mods.empty()) {
      link.items.push_back(SExpr::keyword("mods"));
      SExpr mods = SExpr::list({});
      for (Mod m : l.mods.list()) mods.items.push_back(SExpr::symbol(mod_name(m)));
      link.items.push_back(std::move(mods));
    }
    link.items.push_back(SExpr::keyword("cause"));
    link.items.push_back(cz_to_sexpr(store, cl.cause));
    link.items.push_back(SExpr::keyword("effect"));
    link.items.push_back(cz_to_sexpr(store, cl.effect));
    out.items.push_back(SExpr::keyword("obj"));
    out.items.push_back(std::move(link));
  }
  if (c.from) {
    out.items.push_back(SExpr::keyword("from"));
    out.items.push_back(SExpr::symbol(store.entity_data(*c.from).text()));
  }
  if (c.to) {
    out.items.push_back(SExpr::keyword("to"));
    out.items.push_back(SExpr::symbol(store.entity_data(*c.to).text()));
  }
  if (c.instrument) {
    out.items.push_back(SExpr::keyword("inst"));
    out.items.push_back(SExpr::symbol(store.entity_data(*c.instrument).text()));
  }
  if (c.state) {
    out.items.push_back(SExpr::keyword("state"));
    if (c.state->anchor) {
      out.items.push_back(SExpr::list({SExpr::symbol(state_name(c.state->name)),
                                       SExpr::keyword("anchor"), SExpr::symbol(*c.state->anchor)}));
    } else {
      out.items.push_back(SExpr::symbol(state_name(c.state->name)));
    }
  }
  if (!c.mods.empty()) {
    out.items.push_back(SExpr::keyword("mods"));
    SExpr mods = SExpr::list({});
    for (Mod m : c.mods.list()) mods.items.push_back(SExpr::symbol(mod_name(m)));
    out.items.push_back(std::move(mods));
  }
  return out;
}

std::string cz_to_text(const Store& store, CzId id) { return write_sexpr(cz_to_sexpr(store, id)); }

CzId cz_from_text(Store& store, std::string_view text) {
  auto forms = parse_sexprs(text);
  if (forms.size() != 1) raise(Errc::SyntaxError, "expected exactly one cz form");
  Ctx ctx;
  SExpr norm = norm_cz(forms[0], ctx, false);
  std::map<std::string, CzId> labels;
  return build_cz(store, norm, labels, false);
}

}  // namespace cdplus
