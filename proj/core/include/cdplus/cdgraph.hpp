#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cdplus/errors.hpp"

namespace cdplus {

struct EntityId {
  uint32_t value = 0;
  friend auto operator<=>(EntityId, EntityId) = default;
};
struct CzId {
  uint32_t value = 0;
  friend auto operator<=>(CzId, CzId) = default;
};
struct LinkId {
  uint32_t value = 0;
  friend auto operator<=>(LinkId, LinkId) = default;
};

// Primitive acts are a closed set; unknown names are rejected at parse time.
enum class Act : uint8_t { Ptrans, Mtrans, Mbuild, Concp, Want, Say, Anticipate, Push, Be };

enum class StateName : uint8_t {
  Open,
  Pleased,
  Displeased,
  Anticipation,
  Hope,
  Frustrated,
  Fear,
  Disappointed,
  Relieved,
};

// c = conditional, f = future, can = ability modal, neg = negation,
// qwhy = why-interrogative, past = past tense.
enum class Mod : uint8_t { C = 0, F, Can, Neg, Qwhy, Past };

const char* act_name(Act) noexcept;
const char* state_name(StateName) noexcept;
const char* mod_name(Mod) noexcept;
std::optional<Act> parse_act(std::string_view);
std::optional<StateName> parse_state(std::string_view);
std::optional<Mod> parse_mod(std::string_view);

class ModSet {
public:
  ModSet() = default;
  ModSet(std::initializer_list<Mod> mods);

  ModSet with(Mod) const;  // throws BadObject when combining f with past
  ModSet without(Mod) const;
  bool has(Mod) const;
  bool empty() const { return bits_ == 0; }
  bool operator==(const ModSet&) const = default;

  // Fixed print order: c f can neg qwhy past.
  std::string to_string() const;
  std::vector<Mod> list() const;

private:
  uint8_t bits_ = 0;
  void check() const;
};

struct StructureAnchor {
  std::string id;
  std::string uri;  // opaque, never interpreted
};

struct EntityData {
  std::string name;
  std::string param;  // the "X" in Tool(X); empty when absent
  std::optional<std::string> anchor;

  std::string text() const { return param.empty() ? name : name + "(" + param + ")"; }
};

struct StateRef {
  StateName name;
  std::optional<std::string> anchor;
  bool operator==(const StateRef&) const = default;
};

using ObjectRef = std::variant<std::monostate, EntityId, CzId, LinkId>;

struct Conceptualization {
  CzId id;
  std::optional<std::string> label;
  EntityId actor;
  Act act = Act::Be;
  ObjectRef object;
  std::optional<EntityId> from;
  std::optional<EntityId> to;
  std::optional<EntityId> instrument;
  ModSet mods;
  std::optional<StateRef> state;  // only meaningful with act == Be
};

// Field bundle handed to assert_cz; the id is chosen by the store.
struct CzSpec {
  std::optional<std::string> label;
  EntityId actor;
  Act act = Act::Be;
  ObjectRef object;
  std::optional<EntityId> from;
  std::optional<EntityId> to;
  std::optional<EntityId> instrument;
  ModSet mods;
  std::optional<StateRef> state;
};

struct CausalLink {
  CzId cause, effect;
};
struct TemporalLink {
  CzId before, after;
};
struct StateAttrLink {
  EntityId entity;
  StateRef state;
  CzId cz;
};

struct LinkRecord {
  LinkId id;
  std::variant<CausalLink, TemporalLink, StateAttrLink> kind;
  ModSet mods;
};

struct Elaboration {
  std::variant<Act, StateName> symbol;
  std::vector<CzId> script;  // consecutive entries are temporally linked
};

std::string symbol_text(const std::variant<Act, StateName>&);

// Single-writer arena for CD+ graphs. Copyable; copies are independent
// snapshots safe to read from other threads.
class Store {
public:
  Store() = default;

  // --- entities -----------------------------------------------------------
  EntityId entity(std::string_view name, std::string_view param = "");
  std::optional<EntityId> find_entity(std::string_view name, std::string_view param = "") const;
  const EntityData& entity_data(EntityId) const;
  void set_entity_anchor(EntityId, std::string anchor_id);
  std::optional<EntityId> entity_from_text(std::string_view text) const;  // "Tool(X)" form
  EntityId intern_from_text(std::string_view text);

  // --- grounding anchors ----------------------------------------------------
  void anchor_act(Act, StructureAnchor);
  void anchor_state(StateName, StructureAnchor);
  bool act_anchored(Act) const;
  bool state_anchored(StateName) const;

  // --- conceptualizations ---------------------------------------------------
  CzId assert_cz(const CzSpec&);
  CzId find_or_assert(const CzSpec&);  // dedup by canonical form; ignores label on hit
  const Conceptualization& cz(CzId) const;
  bool has(CzId) const;
  bool has(LinkId) const;
  std::optional<CzId> find_label(std::string_view) const;
  std::size_t cz_count() const { return czs_.size(); }
  std::span<const Conceptualization> czs() const { return czs_; }

  // --- links ----------------------------------------------------------------
  LinkId add_link(const CausalLink&, ModSet = {});
  LinkId add_link(const TemporalLink&, ModSet = {});
  LinkId add_link(const StateAttrLink&, ModSet = {});
  LinkId find_or_link(const CausalLink&, ModSet = {});
  const LinkRecord& link(LinkId) const;
  std::span<const LinkRecord> links() const { return links_; }

  // --- elaborations -----------------------------------------------------------
  void add_elaboration(Elaboration);
  const Elaboration* elaboration_of(const std::variant<Act, StateName>&) const;

  // --- operations --------------------------------------------------------------
  // WANT -> CONCP(wanter, causal{c,f}(object, wanter BE Pleased{f})).
  CzId elaborate_want(CzId want);

  // Deterministic textual form; labels excluded, ids replaced by DFS ordinals.
  std::string canonicalize(CzId root) const;
  std::string canonicalize_link(LinkId) const;

  // Acts/states reachable from root with neither anchor nor elaboration,
  // after expanding elaborations to fixpoint.
  std::vector<std::string> ground_check(CzId root) const;

  bool equal(CzId a, CzId b) const { return canonicalize(a) == canonicalize(b); }

  // Deep copy of a subtree from another store; shares structure via find_or_assert.
  CzId import_subtree(const Store& src, CzId root);

  std::vector<LinkId> causal_links_from(CzId cause) const;
  std::vector<LinkId> causal_links_to(CzId effect) const;

private:
  std::vector<EntityData> entities_;
  std::map<std::pair<std::string, std::string>, EntityId> entity_index_;
  std::vector<Conceptualization> czs_;
  std::vector<LinkRecord> links_;
  std::map<std::string, CzId> labels_;
  std::map<std::string, CzId> canon_index_;
  std::map<std::string, LinkId> link_index_;
  std::map<std::string, Elaboration> elaborations_;
  std::map<Act, StructureAnchor> act_anchors_;
  std::map<StateName, StructureAnchor> state_anchors_;

  void validate_spec(const CzSpec&) const;
  CzId push_cz(const CzSpec&);
  std::string canon_of_spec(const CzSpec&) const;
  void canon_cz(CzId, std::string& out, std::map<uint32_t, int>& seen, int& next) const;
  void canon_link(const LinkRecord&, std::string& out, std::map<uint32_t, int>& seen,
                  int& next) const;
  bool temporal_reaches(CzId from, CzId to) const;
};

}  // namespace cdplus
