#include <benchmark/benchmark.h>

#include <random>

#include "cdplus/cdx.hpp"
#include "cdplus/matcher.hpp"

using namespace cdplus;

namespace {

Store make_store(int czs) {
  std::mt19937 rng(1234);
  Store store;
  const char* entities[] = {"Person", "Robot", "Door", "Table", "Tool(X)", "Cat"};
  const Act acts[] = {Act::Ptrans, Act::Want, Act::Be, Act::Push, Act::Say};
  std::vector<CzId> ids;
  for (int i = 0; i < czs; ++i) {
    CzSpec s;
    s.actor = store.intern_from_text(entities[rng() % 6]);
    s.act = acts[rng() % 5];
    if (s.act == Act::Want && !ids.empty()) {
      s.object = ids[rng() % ids.size()];
    } else if (rng() % 2) {
      s.object = store.intern_from_text(entities[rng() % 6]);
    }
    if (s.act == Act::Be && rng() % 2) s.state = StateRef{StateName::Open, std::nullopt};
    if (rng() % 4 == 0) s.to = store.intern_from_text(entities[rng() % 6]);
    ids.push_back(store.assert_cz(s));
  }
  return store;
}

Pattern want_pattern() {
  CdxDocument doc = parse(
      "(rule :name \"b\" :priority 1 :when ((on x)) "
      ":then ((assert (cz :actor (?a entity) :act WANT :obj (?c cz)))))");
  const SExpr& clause = doc.items[0].kw("clauses")->items[0];
  return pattern_from_sexpr(clause.kw("then")->items[0].items[1]);
}

}  // namespace

static void BM_FindAll(benchmark::State& state) {
  Store store = make_store(static_cast<int>(state.range(0)));
  Pattern p = want_pattern();
  for (auto _ : state) {
    auto results = find_all(p, store, {});
    benchmark::DoNotOptimize(results);
  }
}
BENCHMARK(BM_FindAll)->Arg(8)->Arg(64)->Arg(512);

static void BM_Canonicalize(benchmark::State& state) {
  Store store = make_store(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    std::string canon = store.canonicalize(CzId{static_cast<uint32_t>(state.range(0) - 1)});
    benchmark::DoNotOptimize(canon);
  }
}
BENCHMARK(BM_Canonicalize)->Arg(8)->Arg(64)->Arg(512);

BENCHMARK_MAIN();
