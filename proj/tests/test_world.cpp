#include <doctest.h>

#include <queue>
#include <set>

#include "cdplus/cdx.hpp"
#include "cdplus/world.hpp"

using namespace cdplus;

namespace {

WorldState scenario_world(const std::string& tool_loc) {
  WorldState w;
  w.locations = {"Table", "PersonLoc", "RobotLoc", "Elsewhere"};
  w.place(WorldKey{"Person", ""}, "PersonLoc");
  w.place(WorldKey{"Robot", ""}, "RobotLoc");
  w.place(WorldKey{"Tool", "X"}, tool_loc);
  return w;
}

// Exhaustive search over every legal action sequence up to the depth bound.
// Independent of the planner: plain breadth-first flooding of the state
// space, returning the minimal number of steps to the goal (or -1).
int oracle_min_steps(const WorldState& w, const WorldKey& agent, const Fact& goal, int max_depth) {
  auto key = [](const std::map<WorldKey, std::string>& at) {
    std::string s;
    for (const auto& [e, l] : at) s += e.text() + "@" + l + "|";
    return s;
  };
  auto satisfied = [&](const std::map<WorldKey, std::string>& at) {
    auto it = at.find(goal.object);
    return it != at.end() && it->second == goal.location;
  };
  if (satisfied(w.at)) return 0;
  std::queue<std::pair<std::map<WorldKey, std::string>, int>> frontier;
  std::set<std::string> seen;
  frontier.push({w.at, 0});
  seen.insert(key(w.at));
  while (!frontier.empty()) {
    auto [at, depth] = frontier.front();
    frontier.pop();
    if (depth == max_depth) continue;
    for (const WorldKey& obj : w.entities) {
      if (obj == agent) continue;
      for (const std::string& from : w.locations) {
        if (from == kElsewhere) continue;
        auto it = at.find(obj);
        if (it == at.end() || it->second != from) continue;
        for (const std::string& to : w.locations) {
          if (to == kElsewhere || to == from) continue;
          auto next = at;
          next[obj] = to;
          if (satisfied(next)) return depth + 1;
          if (seen.insert(key(next)).second) frontier.push({next, depth + 1});
        }
      }
    }
  }
  return -1;
}

}  // namespace

TEST_CASE("plan finds the single-step fetch") {
  WorldState w = scenario_world("Table");
  PlanResult r = plan(w, WorldKey{"Robot", ""}, Fact{WorldKey{"Tool", "X"}, "PersonLoc"});
  REQUIRE(std::holds_alternative<Plan>(r));
  const Plan& p = std::get<Plan>(r);
  REQUIRE(p.steps.size() == 1);
  CHECK(p.steps[0].object.text() == "Tool(X)");
  CHECK(p.steps[0].from == "Table");
  CHECK(p.steps[0].to == "PersonLoc");
}

TEST_CASE("plan returns an empty plan when the goal already holds") {
  WorldState w = scenario_world("PersonLoc");
  PlanResult r = plan(w, WorldKey{"Robot", ""}, Fact{WorldKey{"Tool", "X"}, "PersonLoc"});
  REQUIRE(std::holds_alternative<Plan>(r));
  CHECK(std::get<Plan>(r).steps.empty());
}

TEST_CASE("plan failure names the blocking precondition") {
  WorldState w = scenario_world("Elsewhere");
  PlanResult r = plan(w, WorldKey{"Robot", ""}, Fact{WorldKey{"Tool", "X"}, "PersonLoc"});
  REQUIRE(std::holds_alternative<PlanFailure>(r));
  const PlanFailure& f = std::get<PlanFailure>(r);
  CHECK(f.unsatisfied == Fact{WorldKey{"Tool", "X"}, "Table"});
  CHECK(f.at_depth == 1);
}

TEST_CASE("plan_cz speaks conceptualizations at the boundary") {
  WorldState w = scenario_world("Elsewhere");
  Store store;
  CzId goal = cz_from_text(store, "(cz :actor Tool(X) :act BE :to PersonLoc)");
  auto r = plan_cz(store, goal, w, WorldKey{"Robot", ""});
  REQUIRE(std::holds_alternative<PlanFailureCz>(r));
  CHECK(store.canonicalize(std::get<PlanFailureCz>(r).unsatisfied) ==
        "(cz :actor Tool(X) :act BE :to Table)");

  CzId bad = cz_from_text(store, "(cz :actor Person :act WANT :obj Tool(X))");
  CHECK_THROWS_WITH_AS(plan_cz(store, bad, w, WorldKey{"Robot", ""}),
                       doctest::Contains("MalformedGoal"), Error);
}

TEST_CASE("execute applies plans stepwise and keeps placement invariants") {
  WorldState w = scenario_world("Table");
  PlanResult r = plan(w, WorldKey{"Robot", ""}, Fact{WorldKey{"Tool", "X"}, "PersonLoc"});
  auto events = execute(std::get<Plan>(r), w);
  CHECK(events.size() == 1);
  CHECK(w.location_of(WorldKey{"Tool", "X"}) == "PersonLoc");
  w.check_invariants();

  // empty plan: no change, no events
  WorldState before = w;
  CHECK(execute(Plan{}, w).empty());
  CHECK(w.at == before.at);
}

TEST_CASE("execute rejects stale plans") {
  WorldState w = scenario_world("Table");
  Plan p = std::get<Plan>(plan(w, WorldKey{"Robot", ""}, Fact{WorldKey{"Tool", "X"}, "PersonLoc"}));
  w.at[WorldKey{"Tool", "X"}] = "RobotLoc";  // world moved on
  CHECK_THROWS_WITH_AS(execute(p, w), doctest::Contains("PreconditionViolated"), Error);
}

TEST_CASE("observe emits the full snapshot as ground state czs") {
  WorldState w = scenario_world("Table");
  Store store;
  auto czs = observe(w, store);
  REQUIRE(czs.size() == 3);
  std::vector<std::string> canon;
  for (CzId id : czs) canon.push_back(store.canonicalize(id));
  CHECK(std::find(canon.begin(), canon.end(), "(cz :actor Tool(X) :act BE :to Table)") !=
        canon.end());

  WorldState empty;
  Store s2;
  CHECK(observe(empty, s2).empty());
}

TEST_CASE("percepts round-trip through cdx") {
  WorldState w = scenario_world("Table");
  Store store;
  for (CzId id : observe(w, store)) {
    Store other;
    CzId back = cz_from_text(other, cz_to_text(store, id));
    CHECK(other.canonicalize(back) == store.canonicalize(id));
  }
}

TEST_CASE("held entities report their holder") {
  WorldState w = scenario_world("Table");
  w.holding[WorldKey{"Robot", ""}].push_back(WorldKey{"Wrench", ""});
  w.entities.push_back(WorldKey{"Wrench", ""});
  w.check_invariants();
  Store store;
  auto czs = observe(w, store);
  bool found = false;
  for (CzId id : czs)
    if (store.canonicalize(id) == "(cz :actor Wrench :act BE :to Robot)") found = true;
  CHECK(found);
}

TEST_CASE("planner agrees with exhaustive search over all tool placements") {
  int mismatches = 0;
  for (const char* loc : {"Table", "PersonLoc", "RobotLoc", "Elsewhere"}) {
    WorldState w = scenario_world(loc);
    Fact goal{WorldKey{"Tool", "X"}, "PersonLoc"};
    PlanResult r = plan(w, WorldKey{"Robot", ""}, goal);
    int oracle = oracle_min_steps(w, WorldKey{"Robot", ""}, goal, 3);
    if (std::holds_alternative<Plan>(r)) {
      if (oracle != static_cast<int>(std::get<Plan>(r).steps.size())) ++mismatches;
    } else {
      if (oracle != -1) ++mismatches;
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("planner agrees with exhaustive search on richer worlds") {
  // up to 4 entities x 4 locations, every placement combination, depth <= 3
  const std::vector<std::string> locs = {"Table", "PersonLoc", "RobotLoc", "Elsewhere"};
  int mismatches = 0;
  int cases = 0;
  for (int tool = 0; tool < 4; ++tool) {
    for (int box = 0; box < 4; ++box) {
      for (int goal_loc = 0; goal_loc < 4; ++goal_loc) {
        WorldState w;
        w.locations = locs;
        w.place(WorldKey{"Robot", ""}, "RobotLoc");
        w.place(WorldKey{"Person", ""}, "PersonLoc");
        w.place(WorldKey{"Tool", "X"}, locs[tool]);
        w.place(WorldKey{"Box", ""}, locs[box]);
        Fact goal{WorldKey{"Tool", "X"}, locs[goal_loc]};
        PlanResult r = plan(w, WorldKey{"Robot", ""}, goal);
        int oracle = oracle_min_steps(w, WorldKey{"Robot", ""}, goal, 3);
        ++cases;
        if (std::holds_alternative<Plan>(r)) {
          if (oracle != static_cast<int>(std::get<Plan>(r).steps.size())) ++mismatches;
        } else {
          if (oracle != -1) ++mismatches;
        }
      }
    }
  }
  CHECK(cases == 64);
  CHECK(mismatches == 0);
}
