#include <doctest.h>

#include "cdplus/rules.hpp"
#include "test_support.hpp"

using namespace cdplus;

namespace {

struct RobotFailureView {
  Store store;
  std::vector<TriggerEvent> events;
  std::map<std::pair<std::string, std::string>, std::string> attitudes;
  std::map<std::string, bool> capabilities{{"can-ptrans", true}};
  std::vector<std::string> peers{"Person"};
  std::vector<ActiveAffect> affects;
  std::set<std::string> knowledge{"why-answer-pleases Person"};

  CzId goal, want, unsat, predicted;

  RobotFailureView() {
    attitudes[{"Robot", "Person"}] = "SERVILE";
    attitudes[{"Person", "Robot"}] = "COOPERATIVE";
    goal = cz_from_text(store,
                        "(cz :actor Robot :act PTRANS :obj Tool(X) :from Table :to Person)");
    want = cz_from_text(store, "(cz :actor Robot :act WANT :obj (cz :actor Robot :act PTRANS "
                               ":obj Tool(X) :from Table :to Person))");
    unsat = cz_from_text(store, "(cz :actor Tool(X) :act BE :to Table)");
    predicted = cz_from_text(
        store, "(cz :actor Person :act BE :state DISAPPOINTED :obj (cz :actor Robot :act PTRANS "
               ":obj Tool(X) :from Table :to Person) :mods (f))");
    events.push_back(TriggerEvent{
        "mconc-failed",
        {{"mconc", 1}, {"want", want}, {"goal", goal}, {"source", std::string("adopted")},
         {"from", std::string("Person")}, {"unsat", unsat}},
        10});
    events.push_back(TriggerEvent{"prediction",
                                  {{"about", std::string("Person")}, {"negative", predicted}},
                                  11});
  }

  AgentView view() {
    AgentView v;
    v.self = "Robot";
    v.store = &store;
    v.events = &events;
    v.attitudes = &attitudes;
    v.capabilities = &capabilities;
    v.peers = &peers;
    v.affects = &affects;
    v.knowledge = &knowledge;
    return v;
  }
};

}  // namespace

TEST_CASE("bundled rulebase loads 13 rules with priorities 10..130") {
  cdtest::use_source_data_root();
  Rulebase rb = load_builtin_rulebase();
  REQUIRE(rb.size() == 13);
  for (std::size_t i = 0; i < rb.size(); ++i) {
    CHECK(rb.rules()[i].priority == static_cast<int>((i + 1) * 10));
    CHECK(rb.rules()[i].name == "R" + std::to_string(i + 1));
  }
}

TEST_CASE("an empty document loads an empty rulebase") {
  CHECK(Rulebase::load(CdxDocument{}).empty());
}

TEST_CASE("duplicate rule names are rejected") {
  CdxDocument doc = parse(
      "(rule :name \"R\" :priority 1 :when ((on x)) :then ())\n"
      "(rule :name \"R\" :priority 2 :when ((on x)) :then ())");
  CHECK_THROWS_WITH_AS(Rulebase::load(doc), doctest::Contains("DuplicateRuleName"), Error);
}

TEST_CASE("effects may only use trigger-bound variables") {
  CdxDocument doc = parse(
      "(rule :name \"R\" :priority 1 :when ((on x :cz ?w)) "
      ":then ((set-affect HOPE on :object ?other)))");
  CHECK_THROWS_WITH_AS(Rulebase::load(doc), doctest::Contains("UnboundEffectVariable"), Error);
}

TEST_CASE("failure state fires R6..R9 in order with the expected effect sequence") {
  cdtest::use_source_data_root();
  Rulebase rb = load_builtin_rulebase();
  RobotFailureView fixture;
  RefractoryState refractory;
  auto firings = fire_cycle(rb, fixture.view(), refractory);
  REQUIRE(firings.size() == 4);
  CHECK(firings[0].rule->name == "R6");
  CHECK(firings[1].rule->name == "R7");
  CHECK(firings[2].rule->name == "R8");
  CHECK(firings[3].rule->name == "R9");

  // flattened effect sequence: FRUSTRATED, Displeased, FEAR, inability report
  std::vector<std::string> flat;
  for (const Firing& f : firings)
    for (const Effect& e : clause_effects(f)) {
      if (e.kind == Effect::Kind::SetAffect) flat.push_back("SetAffect " + e.state);
      if (e.kind == Effect::Kind::Emit) flat.push_back("Emit");
      if (e.kind == Effect::Kind::RecordCause) flat.push_back("RecordCause");
    }
  CHECK(flat == std::vector<std::string>{"SetAffect FRUSTRATED", "SetAffect Displeased",
                                         "SetAffect FEAR", "RecordCause", "Emit"});
}

TEST_CASE("no matching triggers fire nothing") {
  cdtest::use_source_data_root();
  Rulebase rb = load_builtin_rulebase();
  RobotFailureView fixture;
  fixture.events.clear();
  RefractoryState refractory;
  CHECK(fire_cycle(rb, fixture.view(), refractory).empty());
}

TEST_CASE("the refractory set blocks a second firing for the same state") {
  cdtest::use_source_data_root();
  Rulebase rb = load_builtin_rulebase();
  RobotFailureView fixture;
  RefractoryState refractory;
  CHECK(fire_cycle(rb, fixture.view(), refractory).size() == 4);
  CHECK(fire_cycle(rb, fixture.view(), refractory).empty());
}

TEST_CASE("R8 needs a prediction event") {
  cdtest::use_source_data_root();
  Rulebase rb = load_builtin_rulebase();
  RobotFailureView fixture;
  fixture.events.pop_back();  // drop the prediction
  RefractoryState refractory;
  auto firings = fire_cycle(rb, fixture.view(), refractory);
  for (const Firing& f : firings) CHECK(f.rule->name != "R8");
}

TEST_CASE("R5 is gated on the attitude toward the sender") {
  cdtest::use_source_data_root();
  Rulebase rb = load_builtin_rulebase();
  RobotFailureView fixture;
  fixture.events.clear();
  CzId payload = cz_from_text(
      fixture.store,
      "(cz :actor Person :act WANT :obj (cz :actor Robot :act PTRANS :obj Tool(X) :from Table "
      ":to Person))");
  fixture.events.push_back(TriggerEvent{
      "msg-in",
      {{"from", std::string("Person")}, {"illoc", std::string("directive")}, {"payload", payload}},
      12});

  RefractoryState r1;
  auto firings = fire_cycle(rb, fixture.view(), r1);
  bool adopted = false;
  for (const Firing& f : firings)
    if (f.rule->name == "R5") adopted = true;
  CHECK(adopted);

  fixture.attitudes[{"Robot", "Person"}] = "REBELLIOUS";
  RefractoryState r2;
  for (const Firing& f : fire_cycle(rb, fixture.view(), r2)) CHECK(f.rule->name != "R5");
}

TEST_CASE("firing provenance points at the trigger events") {
  cdtest::use_source_data_root();
  Rulebase rb = load_builtin_rulebase();
  RobotFailureView fixture;
  RefractoryState refractory;
  auto firings = fire_cycle(rb, fixture.view(), refractory);
  REQUIRE(!firings.empty());
  CHECK(firings[0].sources == std::vector<EventId>{10});  // R6 <- mconc-failed
  CHECK(firings[2].sources == std::vector<EventId>{11});  // R8 <- prediction
}

TEST_CASE("determinism: identical views give identical firing sequences") {
  cdtest::use_source_data_root();
  Rulebase rb = load_builtin_rulebase();
  RobotFailureView a, b;
  RefractoryState ra, rb2;
  auto fa = fire_cycle(rb, a.view(), ra);
  auto fb = fire_cycle(rb, b.view(), rb2);
  REQUIRE(fa.size() == fb.size());
  for (std::size_t i = 0; i < fa.size(); ++i) {
    CHECK(fa[i].rule->name == fb[i].rule->name);
    CHECK(fa[i].binds.canonical(a.store) == fb[i].binds.canonical(b.store));
  }
}
