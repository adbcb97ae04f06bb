#include <doctest.h>

#include <algorithm>
#include <random>

#include "cdplus/cdgraph.hpp"

using namespace cdplus;

namespace {

// Fig 1(a): Person pushes the door, which causes the door to be open.
struct PushOpen {
  Store store;
  CzId push, open;
  LinkId causal;

  PushOpen() {
    CzSpec p;
    p.actor = store.entity("Person");
    p.act = Act::Push;
    p.object = store.entity("Door");
    push = store.assert_cz(p);
    CzSpec o;
    o.actor = store.entity("Door");
    o.act = Act::Be;
    o.state = StateRef{StateName::Open, std::nullopt};
    open = store.assert_cz(o);
    causal = store.add_link(CausalLink{push, open});
  }
};

// Independent structural diff used as an oracle against canonical equality.
bool structurally_equal(const Store& a, CzId ia, const Store& b, CzId ib);

bool object_equal(const Store& a, const ObjectRef& oa, const Store& b, const ObjectRef& ob) {
  if (oa.index() != ob.index()) return false;
  if (std::holds_alternative<EntityId>(oa))
    return a.entity_data(std::get<EntityId>(oa)).text() ==
           b.entity_data(std::get<EntityId>(ob)).text();
  if (std::holds_alternative<CzId>(oa))
    return structurally_equal(a, std::get<CzId>(oa), b, std::get<CzId>(ob));
  if (std::holds_alternative<LinkId>(oa)) {
    const auto& la = std::get<CausalLink>(a.link(std::get<LinkId>(oa)).kind);
    const auto& lb = std::get<CausalLink>(b.link(std::get<LinkId>(ob)).kind);
    return a.link(std::get<LinkId>(oa)).mods == b.link(std::get<LinkId>(ob)).mods &&
           structurally_equal(a, la.cause, b, lb.cause) &&
           structurally_equal(a, la.effect, b, lb.effect);
  }
  return true;
}

bool structurally_equal(const Store& a, CzId ia, const Store& b, CzId ib) {
  const auto& ca = a.cz(ia);
  const auto& cb = b.cz(ib);
  auto ent = [](const Store& s, const std::optional<EntityId>& e) {
    return e ? s.entity_data(*e).text() : std::string();
  };
  return ca.act == cb.act && a.entity_data(ca.actor).text() == b.entity_data(cb.actor).text() &&
         ca.mods == cb.mods && ent(a, ca.from) == ent(b, cb.from) &&
         ent(a, ca.to) == ent(b, cb.to) && ent(a, ca.instrument) == ent(b, cb.instrument) &&
         ca.state == cb.state && object_equal(a, ca.object, b, cb.object);
}

CzId build_fig1b(Store& store) {
  CzSpec open;
  open.actor = store.entity("Door");
  open.act = Act::Be;
  open.state = StateRef{StateName::Open, std::nullopt};
  CzId open_id = store.assert_cz(open);
  CzSpec want;
  want.actor = store.entity("Person");
  want.act = Act::Want;
  want.object = open_id;
  return store.assert_cz(want);
}

}  // namespace

TEST_CASE("assert_cz builds the push conceptualization") {
  PushOpen fig;
  const auto& c = fig.store.cz(fig.push);
  CHECK(c.act == Act::Push);
  CHECK(fig.store.entity_data(c.actor).text() == "Person");
  CHECK(fig.store.entity_data(std::get<EntityId>(c.object)).text() == "Door");
}

TEST_CASE("assert_cz auto-wraps WANT of a bare entity as possession transfer") {
  Store store;
  CzSpec want;
  want.actor = store.entity("Person");
  want.act = Act::Want;
  want.object = store.entity("IceCream");
  CzId id = store.assert_cz(want);
  const auto& w = store.cz(id);
  REQUIRE(std::holds_alternative<CzId>(w.object));
  const auto& wrapped = store.cz(std::get<CzId>(w.object));
  CHECK(wrapped.act == Act::Ptrans);
  CHECK(store.entity_data(std::get<EntityId>(wrapped.object)).text() == "IceCream");
  CHECK(store.entity_data(*wrapped.to).text() == "Person");
}

TEST_CASE("assert_cz rejects duplicate labels") {
  Store store;
  CzSpec a;
  a.label = "1";
  a.actor = store.entity("Person");
  a.act = Act::Say;
  store.assert_cz(a);
  CzSpec b;
  b.label = "1";
  b.actor = store.entity("Robot");
  b.act = Act::Say;
  CHECK_THROWS_WITH_AS(store.assert_cz(b), doctest::Contains("LabelClash"), Error);
}

TEST_CASE("assert_cz rejects dangling references and bad objects") {
  Store store;
  CzSpec bad;
  bad.actor = store.entity("Person");
  bad.act = Act::Want;
  bad.object = CzId{42};
  CHECK_THROWS_AS(store.assert_cz(bad), Error);

  CzSpec concp;
  concp.actor = store.entity("Person");
  concp.act = Act::Concp;
  concp.object = store.entity("Door");
  CHECK_THROWS_WITH_AS(store.assert_cz(concp), doctest::Contains("BadObject"), Error);
}

TEST_CASE("qwhy is rejected on nested conceptualizations") {
  Store store;
  CzSpec inner;
  inner.actor = store.entity("Robot");
  inner.act = Act::Ptrans;
  inner.object = store.entity("Tool", "X");
  inner.mods = ModSet{Mod::Qwhy};
  CzId inner_id = store.assert_cz(inner);
  CzSpec outer;
  outer.actor = store.entity("Person");
  outer.act = Act::Want;
  outer.object = inner_id;
  CHECK_THROWS_WITH_AS(store.assert_cz(outer), doctest::Contains("qwhy"), Error);
}

TEST_CASE("modifier set rejects f together with past") {
  CHECK_THROWS_AS(ModSet{}.with(Mod::F).with(Mod::Past), Error);
  CHECK(ModSet{Mod::C, Mod::F}.to_string() == "(c f)");
}

TEST_CASE("add_link validates causal and temporal invariants") {
  PushOpen fig;
  CHECK_THROWS_WITH_AS(fig.store.add_link(CausalLink{fig.push, fig.push}),
                       doctest::Contains("SelfCause"), Error);

  Store store;
  auto mk = [&](const char* actor) {
    CzSpec s;
    s.actor = store.entity(actor);
    s.act = Act::Say;
    return store.assert_cz(s);
  };
  CzId a = mk("A"), b = mk("B"), c = mk("C");
  store.add_link(TemporalLink{a, b});
  store.add_link(TemporalLink{b, c});
  CHECK_THROWS_WITH_AS(store.add_link(TemporalLink{c, a}), doctest::Contains("TemporalCycle"),
                       Error);
  CHECK_THROWS_AS(store.add_link(CausalLink{a, CzId{99}}), Error);
}

TEST_CASE("elaborate_want produces the conditional-future Pleased structure") {
  Store store;
  CzId want = build_fig1b(store);
  CzId concp = store.elaborate_want(want);
  const auto& c = store.cz(concp);
  CHECK(c.act == Act::Concp);
  REQUIRE(std::holds_alternative<LinkId>(c.object));
  const auto& link = store.link(std::get<LinkId>(c.object));
  CHECK(link.mods == ModSet{Mod::C, Mod::F});
  const auto& causal = std::get<CausalLink>(link.kind);
  CHECK(causal.cause == std::get<CzId>(store.cz(want).object));
  const auto& pleased = store.cz(causal.effect);
  CHECK(pleased.act == Act::Be);
  CHECK(pleased.state->name == StateName::Pleased);
  CHECK(pleased.mods == ModSet{Mod::F});
  CHECK(store.entity_data(pleased.actor).text() == "Person");
}

TEST_CASE("elaborate_want output always carries exactly one c+f causal and one Pleased") {
  // property over a handful of differently shaped wants
  for (const char* wanter : {"Person", "Robot", "Cat"}) {
    Store store;
    CzSpec inner;
    inner.actor = store.entity("Robot");
    inner.act = Act::Ptrans;
    inner.object = store.entity("Tool", "X");
    inner.to = store.entity(wanter);
    CzId goal = store.assert_cz(inner);
    CzSpec want;
    want.actor = store.entity(wanter);
    want.act = Act::Want;
    want.object = goal;
    CzId concp = store.elaborate_want(store.assert_cz(want));
    std::string canon = store.canonicalize(concp);
    int causal_cf = 0, pleased = 0;
    for (std::size_t pos = 0; (pos = canon.find("(causal :mods (c f)", pos)) != std::string::npos;
         ++pos)
      ++causal_cf;
    for (std::size_t pos = 0;
         (pos = canon.find(":state Pleased", pos)) != std::string::npos; ++pos)
      ++pleased;
    CHECK(causal_cf == 1);
    CHECK(pleased == 1);
    CHECK(canon.find(":actor " + std::string(wanter) + " :act BE :state Pleased") !=
          std::string::npos);
  }
}

TEST_CASE("elaborate_want rejects non-wants and object-less wants") {
  PushOpen fig;
  CHECK_THROWS_WITH_AS(fig.store.elaborate_want(fig.push), doctest::Contains("BadObject"), Error);
  Store store;
  CzSpec w;
  w.actor = store.entity("Person");
  w.act = Act::Want;
  CzId id = store.assert_cz(w);
  CHECK_THROWS_WITH_AS(store.elaborate_want(id), doctest::Contains("BadObject"), Error);
}

TEST_CASE("canonicalize is deterministic and label-independent") {
  PushOpen fig;
  CHECK(fig.store.canonicalize(fig.push) == fig.store.canonicalize(fig.push));

  // two independently built copies agree
  PushOpen other;
  CHECK(fig.store.canonicalize(fig.push) == other.store.canonicalize(other.push));

  // labels are presentation metadata only
  Store labeled;
  CzSpec p;
  p.label = "9";
  p.actor = labeled.entity("Person");
  p.act = Act::Push;
  p.object = labeled.entity("Door");
  CHECK(labeled.canonicalize(labeled.assert_cz(p)) == fig.store.canonicalize(fig.push));
}

TEST_CASE("canonicalize stable under permuted reconstruction") {
  // Build the same nested graph with different entity/cz insertion orders.
  auto build = [](bool reversed) {
    Store store;
    if (reversed) {
      store.entity("Tool", "X");
      store.entity("Robot");
      store.entity("Person");
    }
    CzSpec inner;
    inner.actor = store.entity("Robot");
    inner.act = Act::Ptrans;
    inner.object = store.entity("Tool", "X");
    inner.from = store.entity("Table");
    inner.to = store.entity("Person");
    CzId goal = store.assert_cz(inner);
    CzSpec want;
    want.actor = store.entity("Person");
    want.act = Act::Want;
    want.object = goal;
    CzId id = store.assert_cz(want);
    return store.canonicalize(id);
  };
  CHECK(build(false) == build(true));
}

TEST_CASE("fig 1(a) and fig 1(b) differ structurally and canonically") {
  PushOpen fig;
  Store other;
  CzId want = build_fig1b(other);
  CHECK_FALSE(structurally_equal(fig.store, fig.push, other, want));
  CHECK(fig.store.canonicalize(fig.push) != other.canonicalize(want));

  // and canonical equality agrees with the structural-diff oracle on copies
  PushOpen copy;
  CHECK(structurally_equal(fig.store, fig.push, copy.store, copy.push));
  CHECK(fig.store.canonicalize(fig.push) == copy.store.canonicalize(copy.push));
}

TEST_CASE("ground_check walks elaborations to anchored ground") {
  PushOpen fig;
  Store& store = fig.store;
  // Unanchored PUSH and Open are reported first.
  auto ungrounded = store.ground_check(fig.push);
  CHECK(ungrounded == std::vector<std::string>{"PUSH"});

  // Elaborate PUSH into two anchored PTRANS steps.
  store.anchor_act(Act::Ptrans, StructureAnchor{"sa-ptrans", ""});
  store.anchor_state(StateName::Open, StructureAnchor{"sa-open", ""});
  CzSpec s1;
  s1.actor = store.entity("Person");
  s1.act = Act::Ptrans;
  s1.object = store.entity("Palm");
  s1.to = store.entity("DoorCenter");
  CzId step1 = store.assert_cz(s1);
  CzSpec s2;
  s2.actor = store.entity("Person");
  s2.act = Act::Ptrans;
  s2.object = store.entity("Strength");
  s2.to = store.entity("DoorSurface");
  CzId step2 = store.assert_cz(s2);
  store.add_elaboration(Elaboration{Act::Push, {step1, step2}});
  CHECK(store.ground_check(fig.push).empty());
}

TEST_CASE("ground_check reports elaboration cycles") {
  Store store;
  CzSpec s;
  s.actor = store.entity("Person");
  s.act = Act::Push;
  s.object = store.entity("Door");
  CzId push = store.assert_cz(s);
  store.add_elaboration(Elaboration{Act::Push, {push}});
  CHECK_THROWS_WITH_AS(store.ground_check(push), doctest::Contains("ElaborationCycle"), Error);
}

TEST_CASE("ground_check is empty for anchored-only graphs") {
  Store store;
  store.anchor_act(Act::Say, StructureAnchor{"sa-say", ""});
  CzSpec s;
  s.actor = store.entity("Person");
  s.act = Act::Say;
  CHECK(store.ground_check(store.assert_cz(s)).empty());
}

TEST_CASE("import_subtree preserves structure across stores") {
  Store a;
  CzId want = build_fig1b(a);
  CzId concp = a.elaborate_want(want);
  Store b;
  CzId imported = b.import_subtree(a, concp);
  CHECK(b.canonicalize(imported) == a.canonicalize(concp));
}
