#include "cdplus/matcher.hpp"

namespace cdplus {

bool Bindings::bind(Sort sort, const std::string& name, BoundValue v) {
  auto key = std::make_pair(static_cast<int>(sort), name);
  auto it = map_.find(key);
  if (it == map_.end()) {
    map_.emplace(std::move(key), std::move(v));
    return true;
  }
  return it->second == v;
}

std::optional<BoundValue> Bindings::get(Sort sort, const std::string& name) const {
  auto it = map_.find(std::make_pair(static_cast<int>(sort), name));
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

std::string Bindings::canonical(const Store& store) const {
  std::string out = "{";
  bool first = true;
  for (const auto& [key, value] : map_) {
    if (!first) out += "; ";
    first = false;
    out += key.second;
    if (std::holds_alternative<std::string>(value)) {
      out += "=" + std::get<std::string>(value);
    } else if (std::holds_alternative<CzId>(value)) {
      out += "=" + store.canonicalize(std::get<CzId>(value));
    } else {
      out += std::string("=") + state_name(std::get<StateName>(value));
    }
  }
  out += "}";
  return out;
}

namespace {

std::optional<std::string> resolve_term(const EntityTerm& t, const MatchContext& ctx) {
  switch (t.kind) {
    case EntityTerm::Kind::Lit: return t.text;
    case EntityTerm::Kind::Self: return ctx.self;
    case EntityTerm::Kind::Speaker: return ctx.speaker;
    case EntityTerm::Kind::Addressee: return ctx.addressee;
    case EntityTerm::Kind::AddresseeLoc:
      if (!ctx.addressee || !ctx.loc_of) return std::nullopt;
      return ctx.loc_of(*ctx.addressee);
    case EntityTerm::Kind::Var: return std::nullopt;  // handled by caller
  }
  return std::nullopt;
}

bool match_entity(const EntityTerm& t, const Store& store, EntityId e, const MatchContext& ctx,
                  Bindings& b) {
  const std::string text = store.entity_data(e).text();
  if (t.kind == EntityTerm::Kind::Var) return b.bind(Sort::Entity, t.text, text);
  auto want = resolve_term(t, ctx);
  return want && *want == text;
}

bool match_mods(const ModsPattern& p, const ModSet& m) { return p.any || p.mods == m; }

// Repeated cz variables constrain by structure, not identity.
bool bind_cz(Bindings& b, const Store& store, const std::string& var, CzId cz) {
  if (auto existing = b.get(Sort::Cz, var))
    return store.equal(std::get<CzId>(*existing), cz);
  return b.bind(Sort::Cz, var, cz);
}

bool match_cz(const Pattern& p, const Store& store, CzId root, const MatchContext& ctx,
              Bindings& b);

bool match_link(const LinkPattern& p, const Store& store, const LinkRecord& l,
                const MatchContext& ctx, Bindings& b) {
  const auto* cl = std::get_if<CausalLink>(&l.kind);
  if (!cl) return false;
  if (!match_mods(p.mods, l.mods)) return false;
  auto match_end = [&](const LinkPattern::End& end, CzId cz) {
    if (end.is_var) return bind_cz(b, store, end.var, cz);
    return match_cz(*end.pat, store, cz, ctx, b);
  };
  return match_end(p.cause, cl->cause) && match_end(p.effect, cl->effect);
}

bool match_cz(const Pattern& p, const Store& store, CzId root, const MatchContext& ctx,
              Bindings& b) {
  const Conceptualization& c = store.cz(root);
  if (c.act != p.act) return false;
  if (!match_mods(p.mods, c.mods)) return false;
  if (!match_entity(p.actor, store, c.actor, ctx, b)) return false;

  switch (p.object.kind) {
    case ObjectPattern::Kind::None:
      if (!std::holds_alternative<std::monostate>(c.object)) return false;
      break;
    case ObjectPattern::Kind::Entity:
      if (!std::holds_alternative<EntityId>(c.object)) return false;
      if (!match_entity(p.object.entity, store, std::get<EntityId>(c.object), ctx, b))
        return false;
      break;
    case ObjectPattern::Kind::Cz:
      if (!std::holds_alternative<CzId>(c.object)) return false;
      if (!match_cz(*p.object.cz, store, std::get<CzId>(c.object), ctx, b)) return false;
      break;
    case ObjectPattern::Kind::CzVar:
      if (!std::holds_alternative<CzId>(c.object)) return false;
      if (!bind_cz(b, store, p.object.var, std::get<CzId>(c.object))) return false;
      break;
    case ObjectPattern::Kind::Link:
      if (!std::holds_alternative<LinkId>(c.object)) return false;
      if (!match_link(*p.object.link, store, store.link(std::get<LinkId>(c.object)), ctx, b))
        return false;
      break;
  }

  auto match_role = [&](const std::optional<EntityTerm>& t, const std::optional<EntityId>& e) {
    if (!t) return !e.has_value();
    if (!e) return false;
    return match_entity(*t, store, *e, ctx, b);
  };
  if (!match_role(p.from, c.from)) return false;
  if (!match_role(p.to, c.to)) return false;
  if (!match_role(p.instrument, c.instrument)) return false;

  if (p.state.has_value() != c.state.has_value()) return false;
  if (p.state) {
    if (p.state->is_var) {
      if (!b.bind(Sort::State, p.state->var, c.state->name)) return false;
    } else if (p.state->name != c.state->name) {
      return false;
    }
  }
  return true;
}

// --- pattern construction ------------------------------------------------------

EntityTerm entity_term_from(const SExpr& e) {
  if (e.is_list()) {
    // (?name sort)
    const std::string& name = e.items[0].text.substr(1);
    const std::string& sort = e.items[1].text;
    if (sort != "entity")
      throw Error(Errc::SortMismatch, "variable ?" + name + " used in entity position");
    return EntityTerm{EntityTerm::Kind::Var, name};
  }
  if (e.text == "self") return EntityTerm{EntityTerm::Kind::Self, {}};
  if (e.text == "@speaker") return EntityTerm{EntityTerm::Kind::Speaker, {}};
  if (e.text == "@addressee") return EntityTerm{EntityTerm::Kind::Addressee, {}};
  if (e.text == "@addressee-loc") return EntityTerm{EntityTerm::Kind::AddresseeLoc, {}};
  if (!e.text.empty() && e.text[0] == '@')
    throw Error(Errc::SortMismatch, "unknown context atom " + e.text);
  return EntityTerm{EntityTerm::Kind::Lit, e.text};
}

ModsPattern mods_pattern_from(const SExpr* e) {
  ModsPattern out;
  if (!e) return out;
  if (e->is_sym("any")) {
    out.any = true;
    return out;
  }
  for (const SExpr& m : e->items) out.mods = out.mods.with(*parse_mod(m.text));
  return out;
}

LinkPattern::End link_end_from(const SExpr& e) {
  LinkPattern::End end;
  if (e.is_list() && !e.items.empty() && e.items[0].kind == SExpr::Kind::Symbol &&
      !e.items[0].text.empty() && e.items[0].text[0] == '?') {
    const std::string& sort = e.items[1].text;
    if (sort != "cz")
      throw Error(Errc::SortMismatch, "causal endpoints take cz-sorted variables");
    end.is_var = true;
    end.var = e.items[0].text.substr(1);
    return end;
  }
  end.pat = std::make_shared<Pattern>(pattern_from_sexpr(e));
  return end;
}

}  // namespace

Pattern pattern_from_sexpr(const SExpr& form) {
  Pattern p;
  p.actor = entity_term_from(*form.kw("actor"));
  p.act = *parse_act(form.kw("act")->text);
  if (const SExpr* obj = form.kw("obj")) {
    if (obj->head() == "cz") {
      p.object.kind = ObjectPattern::Kind::Cz;
      p.object.cz = std::make_shared<Pattern>(pattern_from_sexpr(*obj));
    } else if (obj->head() == "causal") {
      p.object.kind = ObjectPattern::Kind::Link;
      auto link = std::make_shared<LinkPattern>();
      link->mods = mods_pattern_from(obj->kw("mods"));
      link->cause = link_end_from(*obj->kw("cause"));
      link->effect = link_end_from(*obj->kw("effect"));
      p.object.link = std::move(link);
    } else if (obj->is_list()) {
      // variable: entity- or cz-sorted
      const std::string name = obj->items[0].text.substr(1);
      const std::string& sort = obj->items[1].text;
      if (sort == "cz") {
        p.object.kind = ObjectPattern::Kind::CzVar;
        p.object.var = name;
      } else if (sort == "entity") {
        p.object.kind = ObjectPattern::Kind::Entity;
        p.object.entity = EntityTerm{EntityTerm::Kind::Var, name};
      } else {
        throw Error(Errc::SortMismatch, "object variables are entity- or cz-sorted");
      }
    } else {
      p.object.kind = ObjectPattern::Kind::Entity;
      p.object.entity = entity_term_from(*obj);
    }
  }
  if (const SExpr* v = form.kw("from")) p.from = entity_term_from(*v);
  if (const SExpr* v = form.kw("to")) p.to = entity_term_from(*v);
  if (const SExpr* v = form.kw("inst")) p.instrument = entity_term_from(*v);
  if (const SExpr* v = form.kw("state")) {
    StateTerm st;
    if (v->is_list() && !v->items.empty() && v->items[0].kind == SExpr::Kind::Symbol &&
        !v->items[0].text.empty() && v->items[0].text[0] == '?') {
      if (v->items[1].text != "state")
        throw Error(Errc::SortMismatch, "state position takes state-sorted variables");
      st.is_var = true;
      st.var = v->items[0].text.substr(1);
    } else if (v->kind == SExpr::Kind::Symbol) {
      st.name = *parse_state(v->text);
    } else {
      st.name = *parse_state(v->items[0].text);
    }
    p.state = st;
  }
  p.mods = mods_pattern_from(form.kw("mods"));
  return p;
}

std::optional<Bindings> unify(const Pattern& p, const Store& store, CzId root,
                              const MatchContext& ctx) {
  Bindings b;
  if (match_cz(p, store, root, ctx, b)) return b;
  return std::nullopt;
}

bool unify_into(const Pattern& p, const Store& store, CzId root, const MatchContext& ctx,
                Bindings& b) {
  Bindings saved = b;
  if (match_cz(p, store, root, ctx, b)) return true;
  b = saved;
  return false;
}

std::vector<std::pair<CzId, Bindings>> find_all(const Pattern& p, const Store& store,
                                                const MatchContext& ctx) {
  std::vector<std::pair<CzId, Bindings>> out;
  for (const Conceptualization& c : store.czs())
    if (auto b = unify(p, store, c.id, ctx)) out.emplace_back(c.id, std::move(*b));
  return out;
}

namespace {

EntityId build_entity(const EntityTerm& t, const Bindings& b, Store& store,
                      const MatchContext& ctx) {
  if (t.kind == EntityTerm::Kind::Var) {
    auto v = b.get(Sort::Entity, t.text);
    if (!v) raise(Errc::UnboundVariable, "entity variable ?" + t.text + " is unbound");
    return store.intern_from_text(std::get<std::string>(*v));
  }
  auto text = resolve_term(t, ctx);
  if (!text) raise(Errc::UnboundVariable, "context atom has no value here");
  return store.intern_from_text(*text);
}

CzId build_cz_from_pattern(const Pattern& p, const Bindings& b, Store& store,
                           const MatchContext& ctx, bool fresh) {
  CzSpec spec;
  spec.actor = build_entity(p.actor, b, store, ctx);
  spec.act = p.act;
  switch (p.object.kind) {
    case ObjectPattern::Kind::None: break;
    case ObjectPattern::Kind::Entity:
      spec.object = build_entity(p.object.entity, b, store, ctx);
      break;
    case ObjectPattern::Kind::Cz:
      spec.object = build_cz_from_pattern(*p.object.cz, b, store, ctx, fresh);
      break;
    case ObjectPattern::Kind::CzVar: {
      auto v = b.get(Sort::Cz, p.object.var);
      if (!v) raise(Errc::UnboundVariable, "cz variable ?" + p.object.var + " is unbound");
      spec.object = std::get<CzId>(*v);
      break;
    }
    case ObjectPattern::Kind::Link: {
      auto build_end = [&](const LinkPattern::End& end) -> CzId {
        if (end.is_var) {
          auto v = b.get(Sort::Cz, end.var);
          if (!v) raise(Errc::UnboundVariable, "cz variable ?" + end.var + " is unbound");
          return std::get<CzId>(*v);
        }
        return build_cz_from_pattern(*end.pat, b, store, ctx, fresh);
      };
      CzId cause = build_end(p.object.link->cause);
      CzId effect = build_end(p.object.link->effect);
      if (p.object.link->mods.any)
        raise(Errc::UnboundVariable, "cannot construct from a wildcard mods pattern");
      spec.object = store.find_or_link(CausalLink{cause, effect}, p.object.link->mods.mods);
      break;
    }
  }
  if (p.from) spec.from = build_entity(*p.from, b, store, ctx);
  if (p.to) spec.to = build_entity(*p.to, b, store, ctx);
  if (p.instrument) spec.instrument = build_entity(*p.instrument, b, store, ctx);
  if (p.state) {
    if (p.state->is_var) {
      auto v = b.get(Sort::State, p.state->var);
      if (!v) raise(Errc::UnboundVariable, "state variable ?" + p.state->var + " is unbound");
      spec.state = StateRef{std::get<StateName>(*v), std::nullopt};
    } else {
      spec.state = StateRef{p.state->name, std::nullopt};
    }
  }
  if (p.mods.any) raise(Errc::UnboundVariable, "cannot construct from a wildcard mods pattern");
  spec.mods = p.mods.mods;
  return fresh ? store.assert_cz(spec) : store.find_or_assert(spec);
}

}  // namespace

CzId substitute(const Pattern& p, const Bindings& b, Store& store, const MatchContext& ctx) {
  return build_cz_from_pattern(p, b, store, ctx, true);
}

CzId materialize(const Pattern& p, const Bindings& b, Store& store, const MatchContext& ctx) {
  return build_cz_from_pattern(p, b, store, ctx, false);
}

}  // namespace cdplus
