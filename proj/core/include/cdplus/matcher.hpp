#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cdplus/cdgraph.hpp"
#include "cdplus/sexpr.hpp"

namespace cdplus {

enum class Sort : uint8_t { Entity, Cz, State };

struct Variable {
  std::string name;
  Sort sort;
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

// Entity slots hold literals, variables, or context placeholders resolved
// at match time (self for rules; @speaker/@addressee/@addressee-loc for
// surface templates). Entities compare by text, which keeps patterns
// portable across stores.
struct EntityTerm {
  enum class Kind { Lit, Var, Self, Speaker, Addressee, AddresseeLoc };
  Kind kind = Kind::Lit;
  std::string text;  // literal entity text or variable name
};

struct StateTerm {
  bool is_var = false;
  StateName name = StateName::Open;
  std::string var;
};

struct ModsPattern {
  bool any = false;
  ModSet mods;
};

struct Pattern;
struct LinkPattern;

struct ObjectPattern {
  enum class Kind { None, Entity, Cz, CzVar, Link };
  Kind kind = Kind::None;
  EntityTerm entity;
  std::shared_ptr<Pattern> cz;
  std::string var;  // cz-sorted variable name
  std::shared_ptr<LinkPattern> link;
};

struct Pattern {
  EntityTerm actor;
  Act act = Act::Be;
  ObjectPattern object;
  std::optional<EntityTerm> from, to, instrument;
  ModsPattern mods;
  std::optional<StateTerm> state;
};

struct LinkPattern {
  ModsPattern mods;
  struct End {
    bool is_var = false;
    std::string var;
    std::shared_ptr<Pattern> pat;
  };
  End cause, effect;
};

// Entity values bind as canonical text, conceptualizations as store ids,
// states as names.
using BoundValue = std::variant<std::string, CzId, StateName>;

class Bindings {
public:
  bool bind(Sort, const std::string& name, BoundValue);  // false on conflict
  std::optional<BoundValue> get(Sort, const std::string& name) const;
  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }

  // Deterministic rendering, used for refractory keys and trace payloads.
  std::string canonical(const Store&) const;

  auto begin() const { return map_.begin(); }
  auto end() const { return map_.end(); }

private:
  std::map<std::pair<int, std::string>, BoundValue> map_;
};

struct MatchContext {
  std::optional<std::string> self;
  std::optional<std::string> speaker;
  std::optional<std::string> addressee;
  // Resolves an agent's current location (entity text -> location text).
  std::function<std::optional<std::string>(const std::string&)> loc_of;
};

// Builds a Pattern from a normalized (cz ...) form; throws SortMismatch for
// ill-sorted variables.
Pattern pattern_from_sexpr(const SExpr&);

std::optional<Bindings> unify(const Pattern&, const Store&, CzId root,
                              const MatchContext& = {});
// Threads pre-bound variables through (conjunctive triggers).
bool unify_into(const Pattern&, const Store&, CzId root, const MatchContext&, Bindings&);

std::vector<std::pair<CzId, Bindings>> find_all(const Pattern&, const Store&,
                                                const MatchContext& = {});

// Fresh nodes per the substitute contract.
CzId substitute(const Pattern&, const Bindings&, Store&, const MatchContext& = {});
// find_or_assert variant used when constructing rule effects.
CzId materialize(const Pattern&, const Bindings&, Store&, const MatchContext& = {});

}  // namespace cdplus
