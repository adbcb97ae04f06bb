#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cdplus/cdgraph.hpp"

namespace cdplus {

// World entities are keyed by canonical text so states stay independent of
// any particular store.
struct WorldKey {
  std::string name;
  std::string param;
  std::string text() const { return param.empty() ? name : name + "(" + param + ")"; }
  friend auto operator<=>(const WorldKey&, const WorldKey&) = default;
};

WorldKey world_key_from_text(std::string_view);

// The location named Elsewhere is off-scene: nothing can be fetched from it
// or carried to it.
inline constexpr const char* kElsewhere = "Elsewhere";

struct WorldState {
  std::vector<std::string> locations;  // declared order drives action enumeration
  std::vector<WorldKey> entities;      // declared order
  std::map<WorldKey, std::string> at;
  std::map<WorldKey, std::vector<WorldKey>> holding;

  bool is_location(const std::string& name) const;
  std::optional<std::string> location_of(const WorldKey&) const;
  void place(const WorldKey&, const std::string& location);  // declares entity if new
  void check_invariants() const;  // one location or holder per entity
};

struct PtransStep {
  WorldKey agent;
  WorldKey object;
  std::string from;
  std::string to;
};

struct Fact {  // at(object, location)
  WorldKey object;
  std::string location;
  friend auto operator<=>(const Fact&, const Fact&) = default;
};

struct Plan {
  std::vector<PtransStep> steps;
};

struct PlanFailure {
  Fact unsatisfied;  // precondition that did not hold
  int at_depth = 0;
};

using PlanResult = std::variant<Plan, PlanFailure>;

// Deterministic depth-limited forward search (breadth-first over depths,
// actions enumerated lexicographically by declaration order).
PlanResult plan(const WorldState&, const WorldKey& agent, const Fact& goal, int max_depth = 3);

struct WorldEvent {
  PtransStep step;
};

// Applies plan steps in order; throws PreconditionViolated when the world
// changed since planning.
std::vector<WorldEvent> execute(const Plan&, WorldState&);

// Full-observability snapshot as ground state czs: (cz :actor E :act BE :to L).
std::vector<CzId> observe(const WorldState&, Store&);

// --- cz boundary helpers -------------------------------------------------------

// Reads a ground "at" goal from a BE cz; MalformedGoal otherwise.
Fact fact_from_cz(const Store&, CzId);
CzId fact_to_cz(Store&, const Fact&, bool negated = false);

// plan() wrapper with the module's cz-level contract.
struct PlanFailureCz {
  CzId unsatisfied;
  int at_depth = 0;
};
std::variant<Plan, PlanFailureCz> plan_cz(Store&, CzId goal, const WorldState&,
                                          const WorldKey& agent, int max_depth = 3);

}  // namespace cdplus
