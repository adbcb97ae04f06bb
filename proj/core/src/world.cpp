#include "cdplus/world.hpp"

#include <algorithm>
#include <set>

namespace cdplus {

WorldKey world_key_from_text(std::string_view text) {
  auto open = text.find('(');
  if (open != std::string_view::npos && text.back() == ')')
    return WorldKey{std::string(text.substr(0, open)),
                    std::string(text.substr(open + 1, text.size() - open - 2))};
  return WorldKey{std::string(text), ""};
}

bool WorldState::is_location(const std::string& name) const {
  return std::find(locations.begin(), locations.end(), name) != locations.end();
}

std::optional<std::string> WorldState::location_of(const WorldKey& e) const {
  auto it = at.find(e);
  if (it == at.end()) return std::nullopt;
  return it->second;
}

void WorldState::place(const WorldKey& e, const std::string& location) {
  if (!is_location(location)) raise(Errc::MalformedGoal, "unknown location " + location);
  if (!at.count(e) && std::find(entities.begin(), entities.end(), e) == entities.end())
    entities.push_back(e);
  at[e] = location;
}

void WorldState::check_invariants() const {
  std::set<WorldKey> held;
  for (const auto& [holder, items] : holding)
    for (const WorldKey& item : items) {
      if (!held.insert(item).second)
        raise(Errc::PreconditionViolated, item.text() + " held twice");
      if (at.count(item))
        raise(Errc::PreconditionViolated, item.text() + " both placed and held");
    }
  for (const WorldKey& e : entities)
    if (!at.count(e) && !held.count(e))
      raise(Errc::PreconditionViolated, e.text() + " has no location or holder");
}

namespace {

std::vector<std::string> reachable_locations(const WorldState& w) {
  std::vector<std::string> out;
  for (const std::string& l : w.locations)
    if (l != kElsewhere) out.push_back(l);
  return out;
}

// All PTRANS instantiations for one agent, lexicographic by declaration
// order of (object, from, to).
std::vector<PtransStep> all_steps(const WorldState& w, const WorldKey& agent) {
  std::vector<PtransStep> out;
  auto locs = reachable_locations(w);
  for (const WorldKey& obj : w.entities) {
    if (obj == agent) continue;
    for (const std::string& from : locs)
      for (const std::string& to : locs)
        if (from != to) out.push_back(PtransStep{agent, obj, from, to});
  }
  return out;
}

std::string state_key(const std::map<WorldKey, std::string>& at) {
  std::string out;
  for (const auto& [e, l] : at) out += e.text() + "@" + l + ";";
  return out;
}

}  // namespace

PlanResult plan(const WorldState& w, const WorldKey& agent, const Fact& goal, int max_depth) {
  auto goal_holds = [&](const std::map<WorldKey, std::string>& at) {
    auto it = at.find(goal.object);
    return it != at.end() && it->second == goal.location;
  };

  if (goal_holds(w.at)) return Plan{};

  const auto steps = all_steps(w, agent);

  // Breadth-first over plan length; expansion order keeps results
  // lexicographically least among minimal plans.
  struct Node {
    std::map<WorldKey, std::string> at;
    std::vector<PtransStep> path;
  };
  std::vector<Node> frontier{{w.at, {}}};
  std::set<std::string> seen{state_key(w.at)};
  for (int depth = 1; depth <= max_depth; ++depth) {
    std::vector<Node> next;
    for (const Node& node : frontier) {
      for (const PtransStep& s : steps) {
        auto it = node.at.find(s.object);
        if (it == node.at.end() || it->second != s.from) continue;  // precondition
        Node child{node.at, node.path};
        child.at[s.object] = s.to;
        child.path.push_back(s);
        if (goal_holds(child.at)) return Plan{std::move(child.path)};
        if (seen.insert(state_key(child.at)).second) next.push_back(std::move(child));
      }
    }
    frontier = std::move(next);
  }

  // The blocking precondition: first instantiation whose effect would give
  // the goal directly.
  for (const PtransStep& s : steps)
    if (s.object == goal.object && s.to == goal.location)
      return PlanFailure{Fact{s.object, s.from}, 1};
  return PlanFailure{goal, 0};
}

std::vector<WorldEvent> execute(const Plan& plan, WorldState& w) {
  std::vector<WorldEvent> events;
  for (const PtransStep& s : plan.steps) {
    auto loc = w.location_of(s.object);
    if (!loc || *loc != s.from)
      raise(Errc::PreconditionViolated,
            s.object.text() + " is not at " + s.from + " anymore");
    w.at[s.object] = s.to;
    events.push_back(WorldEvent{s});
  }
  w.check_invariants();
  return events;
}

std::vector<CzId> observe(const WorldState& w, Store& store) {
  std::vector<CzId> out;
  for (const WorldKey& e : w.entities) {
    CzSpec spec;
    spec.actor = store.intern_from_text(e.text());
    spec.act = Act::Be;
    if (auto loc = w.location_of(e)) {
      spec.to = store.intern_from_text(*loc);
    } else {
      // held entities report their holder
      for (const auto& [holder, items] : w.holding)
        if (std::find(items.begin(), items.end(), e) != items.end())
          spec.to = store.intern_from_text(holder.text());
    }
    if (!spec.to) continue;
    out.push_back(store.find_or_assert(spec));
  }
  return out;
}

Fact fact_from_cz(const Store& store, CzId id) {
  const Conceptualization& c = store.cz(id);
  if (c.act != Act::Be || !c.to || c.state || !c.mods.empty())
    raise(Errc::MalformedGoal, "goal must be a ground BE-at conceptualization");
  return Fact{world_key_from_text(store.entity_data(c.actor).text()),
              store.entity_data(*c.to).text()};
}

CzId fact_to_cz(Store& store, const Fact& f, bool negated) {
  CzSpec spec;
  spec.actor = store.intern_from_text(f.object.text());
  spec.act = Act::Be;
  spec.to = store.intern_from_text(f.location);
  if (negated) spec.mods = ModSet{Mod::Neg};
  return store.find_or_assert(spec);
}

std::variant<Plan, PlanFailureCz> plan_cz(Store& store, CzId goal, const WorldState& w,
                                          const WorldKey& agent, int max_depth) {
  Fact f = fact_from_cz(store, goal);
  PlanResult r = plan(w, agent, f, max_depth);
  if (std::holds_alternative<Plan>(r)) return std::get<Plan>(r);
  const PlanFailure& fail = std::get<PlanFailure>(r);
  return PlanFailureCz{fact_to_cz(store, fail.unsatisfied), fail.at_depth};
}

}  // namespace cdplus
