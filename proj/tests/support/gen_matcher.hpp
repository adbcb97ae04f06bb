#pragma once

// Random (pattern, store) pairs plus a brute-force subgraph-enumeration
// oracle, independent of the matcher's traversal: it enumerates candidate
// bindings exhaustively and tests substitution equality by canonical form.

#include <map>
#include <random>
#include <vector>

#include "cdplus/matcher.hpp"

namespace cdtest_gen {

using namespace cdplus;

template <typename Rng>
int mroll(Rng& rng, int n) {
  std::uniform_int_distribution<int> d(0, n - 1);
  return d(rng);
}

inline const std::vector<std::string>& matcher_entities() {
  static const std::vector<std::string> pool = {"Person", "Robot", "Door", "Table", "Tool(X)",
                                                "Cat"};
  return pool;
}

template <typename Rng>
Store random_store(Rng& rng, int max_czs = 8) {
  Store store;
  const int n = 1 + mroll(rng, max_czs);
  std::vector<CzId> ids;
  for (int i = 0; i < n; ++i) {
    CzSpec s;
    s.actor = store.intern_from_text(matcher_entities()[mroll(rng, 6)]);
    const Act acts[] = {Act::Ptrans, Act::Want, Act::Be, Act::Push, Act::Say, Act::Concp};
    s.act = acts[mroll(rng, 6)];
    if (s.act == Act::Concp) {
      if (!ids.empty() && mroll(rng, 2)) s.object = ids[mroll(rng, (int)ids.size())];
    } else if (s.act == Act::Want && !ids.empty() && mroll(rng, 2)) {
      s.object = ids[mroll(rng, (int)ids.size())];
    } else if (mroll(rng, 3)) {
      s.object = store.intern_from_text(matcher_entities()[mroll(rng, 6)]);
    }
    if (mroll(rng, 3) == 0) s.from = store.intern_from_text(matcher_entities()[mroll(rng, 6)]);
    if (mroll(rng, 3) == 0) s.to = store.intern_from_text(matcher_entities()[mroll(rng, 6)]);
    if (s.act == Act::Be && mroll(rng, 2)) {
      const StateName states[] = {StateName::Open, StateName::Pleased, StateName::Frustrated};
      s.state = StateRef{states[mroll(rng, 3)], std::nullopt};
    }
    if (mroll(rng, 4) == 0) s.mods = s.mods.with(Mod::F);
    if (mroll(rng, 4) == 0) s.mods = s.mods.with(Mod::Neg);
    if (mroll(rng, 5) == 0) s.mods = s.mods.with(Mod::Can);
    ids.push_back(store.assert_cz(s));
  }
  return store;
}

// Pattern from a concrete cz, abstracting random slots into variables.
template <typename Rng>
Pattern abstract_pattern(Rng& rng, const Store& store, CzId root, int& var_seq) {
  const Conceptualization& c = store.cz(root);
  Pattern p;
  auto term = [&](EntityId e) {
    if (mroll(rng, 3) == 0)
      return EntityTerm{EntityTerm::Kind::Var, "v" + std::to_string(var_seq++)};
    return EntityTerm{EntityTerm::Kind::Lit, store.entity_data(e).text()};
  };
  p.actor = term(c.actor);
  p.act = c.act;
  if (std::holds_alternative<EntityId>(c.object)) {
    p.object.kind = ObjectPattern::Kind::Entity;
    p.object.entity = term(std::get<EntityId>(c.object));
  } else if (std::holds_alternative<CzId>(c.object)) {
    if (mroll(rng, 2) == 0) {
      p.object.kind = ObjectPattern::Kind::CzVar;
      p.object.var = "c" + std::to_string(var_seq++);
    } else {
      p.object.kind = ObjectPattern::Kind::Cz;
      p.object.cz = std::make_shared<Pattern>(
          abstract_pattern(rng, store, std::get<CzId>(c.object), var_seq));
    }
  }
  if (c.from) p.from = term(*c.from);
  if (c.to) p.to = term(*c.to);
  if (c.instrument) p.instrument = term(*c.instrument);
  if (c.state) {
    StateTerm st;
    if (mroll(rng, 3) == 0) {
      st.is_var = true;
      st.var = "s" + std::to_string(var_seq++);
    } else {
      st.name = c.state->name;
    }
    p.state = st;
  }
  p.mods.mods = c.mods;
  return p;
}

template <typename Rng>
Pattern random_pattern(Rng& rng, const Store& store) {
  int var_seq = 0;
  if (store.cz_count() > 0 && mroll(rng, 4) != 0) {
    CzId root{static_cast<uint32_t>(mroll(rng, (int)store.cz_count()))};
    return abstract_pattern(rng, store, root, var_seq);
  }
  // fully random shallow pattern; often matches nothing
  Pattern p;
  p.actor = mroll(rng, 2) ? EntityTerm{EntityTerm::Kind::Var, "a"}
                          : EntityTerm{EntityTerm::Kind::Lit, matcher_entities()[mroll(rng, 6)]};
  const Act acts[] = {Act::Ptrans, Act::Want, Act::Be, Act::Push};
  p.act = acts[mroll(rng, 4)];
  if (mroll(rng, 2)) {
    p.object.kind = ObjectPattern::Kind::CzVar;
    p.object.var = "c";
  } else if (mroll(rng, 2)) {
    p.object.kind = ObjectPattern::Kind::Entity;
    p.object.entity = EntityTerm{EntityTerm::Kind::Var, "o"};
  }
  return p;
}

// --- oracle ------------------------------------------------------------------

inline void oracle_vars(const Pattern& p, std::map<std::pair<int, std::string>, bool>& vars) {
  auto ent = [&](const EntityTerm& t) {
    if (t.kind == EntityTerm::Kind::Var) vars[{(int)Sort::Entity, t.text}] = true;
  };
  ent(p.actor);
  switch (p.object.kind) {
    case ObjectPattern::Kind::Entity: ent(p.object.entity); break;
    case ObjectPattern::Kind::CzVar: vars[{(int)Sort::Cz, p.object.var}] = true; break;
    case ObjectPattern::Kind::Cz: oracle_vars(*p.object.cz, vars); break;
    default: break;
  }
  if (p.from) ent(*p.from);
  if (p.to) ent(*p.to);
  if (p.instrument) ent(*p.instrument);
  if (p.state && p.state->is_var) vars[{(int)Sort::State, p.state->var}] = true;
}

// All (root, bindings) pairs by exhaustive enumeration over candidate values,
// substitution, and canonical-form comparison.
inline std::vector<std::pair<CzId, Bindings>> oracle_find_all(const Pattern& p,
                                                              const Store& store,
                                                              const MatchContext& ctx) {
  std::map<std::pair<int, std::string>, bool> varmap;
  oracle_vars(p, varmap);
  std::vector<std::pair<int, std::string>> vars;
  for (const auto& [key, _] : varmap) vars.push_back(key);

  std::vector<std::string> entity_values;
  for (const Conceptualization& c : store.czs()) {
    auto add = [&](const std::string& t) {
      if (std::find(entity_values.begin(), entity_values.end(), t) == entity_values.end())
        entity_values.push_back(t);
    };
    add(store.entity_data(c.actor).text());
    if (std::holds_alternative<EntityId>(c.object))
      add(store.entity_data(std::get<EntityId>(c.object)).text());
    if (c.from) add(store.entity_data(*c.from).text());
    if (c.to) add(store.entity_data(*c.to).text());
    if (c.instrument) add(store.entity_data(*c.instrument).text());
  }
  std::vector<StateName> state_values = {StateName::Open, StateName::Pleased,
                                         StateName::Displeased, StateName::Anticipation,
                                         StateName::Hope, StateName::Frustrated,
                                         StateName::Fear, StateName::Disappointed,
                                         StateName::Relieved};

  std::vector<std::pair<CzId, Bindings>> results;
  for (const Conceptualization& root : store.czs()) {
    std::vector<Bindings> matched;
    // depth-first cartesian enumeration
    std::vector<std::pair<CzId, Bindings>> unused;
    std::function<void(std::size_t, Bindings)> rec = [&](std::size_t i, Bindings b) {
      if (i == vars.size()) {
        Store scratch = store;  // keep substitution out of the original arena
        try {
          CzId sub = substitute(p, b, scratch, ctx);
          if (scratch.canonicalize(sub) == scratch.canonicalize(root.id)) matched.push_back(b);
        } catch (const Error&) {
        }
        return;
      }
      const auto& [sort, name] = vars[i];
      if (sort == (int)Sort::Entity) {
        for (const std::string& v : entity_values) {
          Bindings next = b;
          next.bind(Sort::Entity, name, v);
          rec(i + 1, next);
        }
      } else if (sort == (int)Sort::Cz) {
        for (const Conceptualization& c : store.czs()) {
          Bindings next = b;
          next.bind(Sort::Cz, name, c.id);
          rec(i + 1, next);
        }
      } else {
        for (StateName s : state_values) {
          Bindings next = b;
          next.bind(Sort::State, name, s);
          rec(i + 1, next);
        }
      }
    };
    rec(0, Bindings{});
    // Distinct cz ids can be structurally equal, so several enumerated
    // bindings may substitute to the same tree. Keep the canonical-first one.
    if (!matched.empty()) {
      std::vector<std::string> seen;
      for (const Bindings& b : matched) {
        std::string key = b.canonical(store);
        bool dup = false;
        for (const std::string& s : seen)
          if (s == key) dup = true;
        if (!dup) {
          seen.push_back(key);
          results.emplace_back(root.id, b);
        }
      }
    }
  }
  return results;
}

}  // namespace cdtest_gen
