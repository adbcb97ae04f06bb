#include "cdplus/cdgraph.hpp"

#include <algorithm>
#include <set>

namespace cdplus {

namespace {

constexpr const char* kActNames[] = {"PTRANS", "MTRANS",      "MBUILD", "CONCP", "WANT",
                                     "SAY",    "ANTICIPATE", "PUSH",   "BE"};
constexpr const char* kStateNames[] = {"Open",       "Pleased", "Displeased",
                                       "ANTICIPATION", "HOPE",    "FRUSTRATED",
                                       "FEAR",         "DISAPPOINTED", "RELIEVED"};
constexpr const char* kModNames[] = {"c", "f", "can", "neg", "qwhy", "past"};

}  // namespace

const char* act_name(Act a) noexcept { return kActNames[static_cast<int>(a)]; }
const char* state_name(StateName s) noexcept { return kStateNames[static_cast<int>(s)]; }
const char* mod_name(Mod m) noexcept { return kModNames[static_cast<int>(m)]; }

std::optional<Act> parse_act(std::string_view s) {
  for (int i = 0; i < 9; ++i)
    if (s == kActNames[i]) return static_cast<Act>(i);
  return std::nullopt;
}

std::optional<StateName> parse_state(std::string_view s) {
  for (int i = 0; i < 9; ++i)
    if (s == kStateNames[i]) return static_cast<StateName>(i);
  return std::nullopt;
}

std::optional<Mod> parse_mod(std::string_view s) {
  for (int i = 0; i < 6; ++i)
    if (s == kModNames[i]) return static_cast<Mod>(i);
  return std::nullopt;
}

ModSet::ModSet(std::initializer_list<Mod> mods) {
  for (Mod m : mods) bits_ |= (1u << static_cast<int>(m));
  check();
}

void ModSet::check() const {
  if (has(Mod::F) && has(Mod::Past))
    raise(Errc::BadObject, "modifiers f and past are mutually exclusive");
}

ModSet ModSet::with(Mod m) const {
  ModSet r = *this;
  r.bits_ |= (1u << static_cast<int>(m));
  r.check();
  return r;
}

ModSet ModSet::without(Mod m) const {
  ModSet r = *this;
  r.bits_ &= ~(1u << static_cast<int>(m));
  return r;
}

bool ModSet::has(Mod m) const { return bits_ & (1u << static_cast<int>(m)); }

std::vector<Mod> ModSet::list() const {
  std::vector<Mod> out;
  for (int i = 0; i < 6; ++i)
    if (bits_ & (1u << i)) out.push_back(static_cast<Mod>(i));
  return out;
}

std::string ModSet::to_string() const {
  std::string out = "(";
  bool first = true;
  for (Mod m : list()) {
    if (!first) out += ' ';
    out += mod_name(m);
    first = false;
  }
  out += ')';
  return out;
}

std::string symbol_text(const std::variant<Act, StateName>& sym) {
  if (std::holds_alternative<Act>(sym)) return act_name(std::get<Act>(sym));
  return state_name(std::get<StateName>(sym));
}

// --- entities ---------------------------------------------------------------

EntityId Store::entity(std::string_view name, std::string_view param) {
  if (name.empty()) raise(Errc::BadObject, "entity name must be nonempty");
  auto key = std::make_pair(std::string(name), std::string(param));
  if (auto it = entity_index_.find(key); it != entity_index_.end()) return it->second;
  EntityId id{static_cast<uint32_t>(entities_.size())};
  entities_.push_back(EntityData{key.first, key.second, std::nullopt});
  entity_index_.emplace(std::move(key), id);
  return id;
}

std::optional<EntityId> Store::find_entity(std::string_view name, std::string_view param) const {
  auto it = entity_index_.find(std::make_pair(std::string(name), std::string(param)));
  if (it == entity_index_.end()) return std::nullopt;
  return it->second;
}

const EntityData& Store::entity_data(EntityId id) const {
  if (id.value >= entities_.size()) raise(Errc::DanglingRef, "unknown entity id");
  return entities_[id.value];
}

void Store::set_entity_anchor(EntityId id, std::string anchor_id) {
  if (id.value >= entities_.size()) raise(Errc::DanglingRef, "unknown entity id");
  entities_[id.value].anchor = std::move(anchor_id);
}

std::optional<EntityId> Store::entity_from_text(std::string_view text) const {
  auto open = text.find('(');
  if (open != std::string_view::npos && text.back() == ')')
    return find_entity(text.substr(0, open), text.substr(open + 1, text.size() - open - 2));
  return find_entity(text);
}

EntityId Store::intern_from_text(std::string_view text) {
  auto open = text.find('(');
  if (open != std::string_view::npos && text.back() == ')')
    return entity(text.substr(0, open), text.substr(open + 1, text.size() - open - 2));
  return entity(text);
}

// --- anchors ------------------------------------------------------------------

void Store::anchor_act(Act a, StructureAnchor sa) { act_anchors_[a] = std::move(sa); }
void Store::anchor_state(StateName s, StructureAnchor sa) { state_anchors_[s] = std::move(sa); }
bool Store::act_anchored(Act a) const { return act_anchors_.count(a) > 0; }
bool Store::state_anchored(StateName s) const { return state_anchors_.count(s) > 0; }

// --- conceptualizations ---------------------------------------------------------

void Store::validate_spec(const CzSpec& spec) const {
  if (spec.actor.value >= entities_.size()) raise(Errc::DanglingRef, "unknown actor entity");
  for (auto role : {spec.from, spec.to, spec.instrument})
    if (role && role->value >= entities_.size()) raise(Errc::DanglingRef, "unknown role entity");

  if (std::holds_alternative<CzId>(spec.object)) {
    CzId child = std::get<CzId>(spec.object);
    if (!has(child)) raise(Errc::DanglingRef, "unknown nested conceptualization");
    // MTRANS/MBUILD/SAY quote their content; everything else may not nest a
    // why-interrogative.
    const bool quoting =
        spec.act == Act::Mtrans || spec.act == Act::Mbuild || spec.act == Act::Say;
    if (!quoting && cz(child).mods.has(Mod::Qwhy))
      raise(Errc::BadObject, "qwhy is only allowed on top-level conceptualizations");
  } else if (std::holds_alternative<LinkId>(spec.object)) {
    LinkId l = std::get<LinkId>(spec.object);
    if (!has(l)) raise(Errc::DanglingRef, "unknown link");
    if (!std::holds_alternative<CausalLink>(link(l).kind))
      raise(Errc::BadObject, "only causal structures may appear as objects");
    if (spec.act == Act::Want)
      raise(Errc::BadObject, "WANT takes an entity or conceptualization object");
  } else if (std::holds_alternative<EntityId>(spec.object)) {
    EntityId e = std::get<EntityId>(spec.object);
    if (e.value >= entities_.size()) raise(Errc::DanglingRef, "unknown object entity");
    if (spec.act == Act::Concp || spec.act == Act::Anticipate)
      raise(Errc::BadObject,
            std::string(act_name(spec.act)) + " requires a conceptualization object");
  }

  if (spec.state && spec.act != Act::Be)
    raise(Errc::BadObject, "state attribution requires act BE");
  if (spec.label) {
    if (spec.label->empty()) raise(Errc::BadObject, "labels must be nonempty");
    if (labels_.count(*spec.label)) raise(Errc::LabelClash, "duplicate label " + *spec.label);
  }
}

CzId Store::push_cz(const CzSpec& spec) {
  CzId id{static_cast<uint32_t>(czs_.size())};
  Conceptualization c;
  c.id = id;
  c.label = spec.label;
  c.actor = spec.actor;
  c.act = spec.act;
  c.object = spec.object;
  c.from = spec.from;
  c.to = spec.to;
  c.instrument = spec.instrument;
  c.mods = spec.mods;
  c.state = spec.state;
  czs_.push_back(std::move(c));
  if (spec.label) labels_.emplace(*spec.label, id);
  canon_index_.emplace(canonicalize(id), id);  // first occurrence wins
  return id;
}

CzId Store::assert_cz(const CzSpec& spec_in) {
  CzSpec spec = spec_in;
  // WANT of a bare entity is auto-wrapped as a possession transfer so that
  // want elaboration stays uniform.
  if (spec.act == Act::Want && std::holds_alternative<EntityId>(spec.object)) {
    CzSpec wrap;
    wrap.actor = spec.actor;
    wrap.act = Act::Ptrans;
    wrap.object = spec.object;
    wrap.to = spec.actor;
    validate_spec(wrap);
    spec.object = find_or_assert(wrap);
  }
  validate_spec(spec);
  return push_cz(spec);
}

CzId Store::find_or_assert(const CzSpec& spec_in) {
  CzSpec spec = spec_in;
  if (spec.act == Act::Want && std::holds_alternative<EntityId>(spec.object)) {
    CzSpec wrap;
    wrap.actor = spec.actor;
    wrap.act = Act::Ptrans;
    wrap.object = spec.object;
    wrap.to = spec.actor;
    validate_spec(wrap);
    spec.object = find_or_assert(wrap);
  }
  validate_spec(spec);
  auto canon = canon_of_spec(spec);
  if (auto it = canon_index_.find(canon); it != canon_index_.end()) return it->second;
  return push_cz(spec);
}

const Conceptualization& Store::cz(CzId id) const {
  if (!has(id)) raise(Errc::DanglingRef, "unknown conceptualization id");
  return czs_[id.value];
}

bool Store::has(CzId id) const { return id.value < czs_.size(); }
bool Store::has(LinkId id) const { return id.value < links_.size(); }

std::optional<CzId> Store::find_label(std::string_view label) const {
  auto it = labels_.find(std::string(label));
  if (it == labels_.end()) return std::nullopt;
  return it->second;
}

// --- links ---------------------------------------------------------------------

bool Store::temporal_reaches(CzId from, CzId to) const {
  if (from == to) return true;
  std::vector<CzId> stack{from};
  std::set<uint32_t> seen;
  while (!stack.empty()) {
    CzId cur = stack.back();
    stack.pop_back();
    if (!seen.insert(cur.value).second) continue;
    for (const auto& l : links_) {
      if (const auto* t = std::get_if<TemporalLink>(&l.kind)) {
        if (t->before == cur) {
          if (t->after == to) return true;
          stack.push_back(t->after);
        }
      }
    }
  }
  return false;
}

LinkId Store::add_link(const CausalLink& l, ModSet mods) {
  if (!has(l.cause) || !has(l.effect)) raise(Errc::DanglingRef, "causal endpoint missing");
  if (l.cause == l.effect) raise(Errc::SelfCause, "a conceptualization cannot cause itself");
  LinkId id{static_cast<uint32_t>(links_.size())};
  links_.push_back(LinkRecord{id, l, mods});
  link_index_.emplace(canonicalize_link(id), id);
  return id;
}

LinkId Store::add_link(const TemporalLink& l, ModSet mods) {
  if (!has(l.before) || !has(l.after)) raise(Errc::DanglingRef, "temporal endpoint missing");
  if (l.before == l.after || temporal_reaches(l.after, l.before))
    raise(Errc::TemporalCycle, "temporal links must stay acyclic");
  LinkId id{static_cast<uint32_t>(links_.size())};
  links_.push_back(LinkRecord{id, l, mods});
  return id;
}

LinkId Store::add_link(const StateAttrLink& l, ModSet mods) {
  if (l.entity.value >= entities_.size()) raise(Errc::DanglingRef, "unknown entity");
  if (!has(l.cz)) raise(Errc::DanglingRef, "unknown conceptualization");
  LinkId id{static_cast<uint32_t>(links_.size())};
  links_.push_back(LinkRecord{id, l, mods});
  return id;
}

LinkId Store::find_or_link(const CausalLink& l, ModSet mods) {
  if (!has(l.cause) || !has(l.effect)) raise(Errc::DanglingRef, "causal endpoint missing");
  if (l.cause == l.effect) raise(Errc::SelfCause, "a conceptualization cannot cause itself");
  LinkRecord probe{LinkId{0}, l, mods};
  std::string canon;
  std::map<uint32_t, int> seen;
  int next = 0;
  canon_link(probe, canon, seen, next);
  if (auto it = link_index_.find(canon); it != link_index_.end()) return it->second;
  return add_link(l, mods);
}

const LinkRecord& Store::link(LinkId id) const {
  if (!has(id)) raise(Errc::DanglingRef, "unknown link id");
  return links_[id.value];
}

std::vector<LinkId> Store::causal_links_from(CzId cause) const {
  std::vector<LinkId> out;
  for (const auto& l : links_)
    if (const auto* c = std::get_if<CausalLink>(&l.kind))
      if (c->cause == cause) out.push_back(l.id);
  return out;
}

std::vector<LinkId> Store::causal_links_to(CzId effect) const {
  std::vector<LinkId> out;
  for (const auto& l : links_)
    if (const auto* c = std::get_if<CausalLink>(&l.kind))
      if (c->effect == effect) out.push_back(l.id);
  return out;
}

// --- elaborations -----------------------------------------------------------------

void Store::add_elaboration(Elaboration e) {
  if (e.script.empty()) raise(Errc::BadObject, "elaboration script must be nonempty");
  for (CzId step : e.script)
    if (!has(step)) raise(Errc::DanglingRef, "elaboration step missing");
  for (std::size_t i = 0; i + 1 < e.script.size(); ++i)
    add_link(TemporalLink{e.script[i], e.script[i + 1]});
  elaborations_[symbol_text(e.symbol)] = std::move(e);
}

const Elaboration* Store::elaboration_of(const std::variant<Act, StateName>& sym) const {
  auto it = elaborations_.find(symbol_text(sym));
  return it == elaborations_.end() ? nullptr : &it->second;
}

// --- elaborate_want ------------------------------------------------------------------

CzId Store::elaborate_want(CzId want) {
  const Conceptualization& w = cz(want);
  if (w.act != Act::Want) raise(Errc::BadObject, "elaborate_want requires a WANT");
  if (!std::holds_alternative<CzId>(w.object))
    raise(Errc::BadObject, "WANT has no conceptualization object");
  CzId obj = std::get<CzId>(w.object);

  CzSpec pleased;
  pleased.actor = w.actor;
  pleased.act = Act::Be;
  pleased.state = StateRef{StateName::Pleased, std::nullopt};
  pleased.mods = ModSet{Mod::F};
  CzId consequent = find_or_assert(pleased);

  LinkId causal = find_or_link(CausalLink{obj, consequent}, ModSet{Mod::C, Mod::F});

  CzSpec concp;
  concp.actor = w.actor;
  concp.act = Act::Concp;
  concp.object = causal;
  return find_or_assert(concp);
}

// --- canonical form --------------------------------------------------------------------

void Store::canon_cz(CzId id, std::string& out, std::map<uint32_t, int>& seen, int& next) const {
  const Conceptualization& c = cz(id);
  if (auto it = seen.find(id.value); it != seen.end()) {
    out += "^" + std::to_string(it->second);
    return;
  }
  seen.emplace(id.value, next++);
  out += "(cz :actor ";
  out += entity_data(c.actor).text();
  out += " :act ";
  out += act_name(c.act);
  if (std::holds_alternative<EntityId>(c.object)) {
    out += " :obj ";
    out += entity_data(std::get<EntityId>(c.object)).text();
  } else if (std::holds_alternative<CzId>(c.object)) {
    out += " :obj ";
    canon_cz(std::get<CzId>(c.object), out, seen, next);
  } else if (std::holds_alternative<LinkId>(c.object)) {
    out += " :obj ";
    canon_link(link(std::get<LinkId>(c.object)), out, seen, next);
  }
  if (c.from) out += " :from " + entity_data(*c.from).text();
  if (c.to) out += " :to " + entity_data(*c.to).text();
  if (c.instrument) out += " :inst " + entity_data(*c.instrument).text();
  if (c.state) {
    out += " :state ";
    out += state_name(c.state->name);
    if (c.state->anchor) out += "@" + *c.state->anchor;
  }
  if (!c.mods.empty()) out += " :mods " + c.mods.to_string();
  out += ")";
}

void Store::canon_link(const LinkRecord& l, std::string& out, std::map<uint32_t, int>& seen,
                       int& next) const {
  if (const auto* c = std::get_if<CausalLink>(&l.kind)) {
    out += "(causal";
    if (!l.mods.empty()) out += " :mods " + l.mods.to_string();
    out += " :cause ";
    canon_cz(c->cause, out, seen, next);
    out += " :effect ";
    canon_cz(c->effect, out, seen, next);
    out += ")";
  } else if (const auto* t = std::get_if<TemporalLink>(&l.kind)) {
    out += "(temporal :before ";
    canon_cz(t->before, out, seen, next);
    out += " :after ";
    canon_cz(t->after, out, seen, next);
    out += ")";
  } else {
    const auto& s = std::get<StateAttrLink>(l.kind);
    out += "(state-attr :entity " + entity_data(s.entity).text() + " :state ";
    out += state_name(s.state.name);
    out += " :cz ";
    canon_cz(s.cz, out, seen, next);
    out += ")";
  }
}

std::string Store::canonicalize(CzId root) const {
  std::string out;
  std::map<uint32_t, int> seen;
  int next = 0;
  canon_cz(root, out, seen, next);
  return out;
}

std::string Store::canonicalize_link(LinkId id) const {
  std::string out;
  std::map<uint32_t, int> seen;
  int next = 0;
  canon_link(link(id), out, seen, next);
  return out;
}

std::string Store::canon_of_spec(const CzSpec& spec) const {
  // Same shape canon_cz would produce for the asserted node.
  std::string out = "(cz :actor " + entity_data(spec.actor).text() + " :act " +
                    act_name(spec.act);
  std::map<uint32_t, int> seen;
  int next = 1;  // the would-be root takes ordinal 0
  if (std::holds_alternative<EntityId>(spec.object)) {
    out += " :obj " + entity_data(std::get<EntityId>(spec.object)).text();
  } else if (std::holds_alternative<CzId>(spec.object)) {
    out += " :obj ";
    canon_cz(std::get<CzId>(spec.object), out, seen, next);
  } else if (std::holds_alternative<LinkId>(spec.object)) {
    out += " :obj ";
    canon_link(link(std::get<LinkId>(spec.object)), out, seen, next);
  }
  if (spec.from) out += " :from " + entity_data(*spec.from).text();
  if (spec.to) out += " :to " + entity_data(*spec.to).text();
  if (spec.instrument) out += " :inst " + entity_data(*spec.instrument).text();
  if (spec.state) {
    out += " :state ";
    out += state_name(spec.state->name);
    if (spec.state->anchor) out += "@" + *spec.state->anchor;
  }
  if (!spec.mods.empty()) out += " :mods " + spec.mods.to_string();
  out += ")";
  return out;
}

// --- ground check ---------------------------------------------------------------------

namespace {

// Symbols named by a cz subtree, first-encounter order, no elaboration
// following.
void collect_symbols(const Store& store, CzId id, std::set<uint32_t>& visited,
                     std::vector<std::variant<Act, StateName>>& out) {
  if (!visited.insert(id.value).second) return;
  const Conceptualization& c = store.cz(id);
  out.emplace_back(c.act);
  if (c.state) out.emplace_back(c.state->name);
  if (std::holds_alternative<CzId>(c.object)) {
    collect_symbols(store, std::get<CzId>(c.object), visited, out);
  } else if (std::holds_alternative<LinkId>(c.object)) {
    const LinkRecord& l = store.link(std::get<LinkId>(c.object));
    if (const auto* cl = std::get_if<CausalLink>(&l.kind)) {
      collect_symbols(store, cl->cause, visited, out);
      collect_symbols(store, cl->effect, visited, out);
    }
  }
}

}  // namespace

std::vector<std::string> Store::ground_check(CzId root) const {
  std::vector<std::string> ungrounded;
  std::set<std::string> reported;
  std::vector<std::string> stack;  // symbol expansion path, for cycle detection
  std::set<std::string> done;

  auto grounded = [&](const std::variant<Act, StateName>& sym) {
    if (std::holds_alternative<Act>(sym)) return act_anchored(std::get<Act>(sym));
    return state_anchored(std::get<StateName>(sym));
  };

  auto expand = [&](auto&& self, const std::variant<Act, StateName>& sym) -> void {
    const std::string name = symbol_text(sym);
    if (grounded(sym) || done.count(name)) return;
    const Elaboration* elab = elaboration_of(sym);
    if (!elab) {
      if (reported.insert(name).second) ungrounded.push_back(name);
      return;
    }
    if (std::find(stack.begin(), stack.end(), name) != stack.end())
      raise(Errc::ElaborationCycle, "elaboration of " + name + " reaches itself");
    stack.push_back(name);
    for (CzId step : elab->script) {
      std::set<uint32_t> visited;
      std::vector<std::variant<Act, StateName>> symbols;
      collect_symbols(*this, step, visited, symbols);
      for (const auto& s : symbols) self(self, s);
    }
    stack.pop_back();
    done.insert(name);
  };

  std::set<uint32_t> visited;
  std::vector<std::variant<Act, StateName>> symbols;
  collect_symbols(*this, root, visited, symbols);
  for (const auto& s : symbols) expand(expand, s);
  return ungrounded;
}

// --- import -------------------------------------------------------------------------------

CzId Store::import_subtree(const Store& src, CzId root) {
  const Conceptualization& c = src.cz(root);
  CzSpec spec;
  spec.actor = intern_from_text(src.entity_data(c.actor).text());
  spec.act = c.act;
  if (std::holds_alternative<EntityId>(c.object)) {
    spec.object = intern_from_text(src.entity_data(std::get<EntityId>(c.object)).text());
  } else if (std::holds_alternative<CzId>(c.object)) {
    spec.object = import_subtree(src, std::get<CzId>(c.object));
  } else if (std::holds_alternative<LinkId>(c.object)) {
    const LinkRecord& l = src.link(std::get<LinkId>(c.object));
    const auto& cl = std::get<CausalLink>(l.kind);
    CzId cause = import_subtree(src, cl.cause);
    CzId effect = import_subtree(src, cl.effect);
    spec.object = find_or_link(CausalLink{cause, effect}, l.mods);
  }
  if (c.from) spec.from = intern_from_text(src.entity_data(*c.from).text());
  if (c.to) spec.to = intern_from_text(src.entity_data(*c.to).text());
  if (c.instrument) spec.instrument = intern_from_text(src.entity_data(*c.instrument).text());
  spec.mods = c.mods;
  spec.state = c.state;
  return find_or_assert(spec);
}

}  // namespace cdplus
