#include <benchmark/benchmark.h>

#include <cstdlib>

#include "cdplus/dialogue.hpp"

using namespace cdplus;

namespace {

Scenario load(const char* name) {
  setenv("CDPLUS_DATA_ROOT", CDPLUS_TEST_DATA_ROOT, 1);
  return Scenario::load(
      load_cdx_file(std::string(CDPLUS_TEST_DATA_ROOT) + "/scenarios/" + name + ".cdx"));
}

}  // namespace

static void BM_RunScenario(benchmark::State& state) {
  const char* name = state.range(0) == 0 ? "success" : "failure";
  setenv("CDPLUS_DATA_ROOT", CDPLUS_TEST_DATA_ROOT, 1);
  Rulebase rulebase = load_builtin_rulebase();
  TemplateTable templates = load_builtin_templates();
  Scenario scenario = load(name);
  for (auto _ : state) {
    Simulation sim(scenario, rulebase, templates);
    benchmark::DoNotOptimize(sim.run().size());
  }
}
BENCHMARK(BM_RunScenario)->Arg(0)->Arg(1);

static void BM_ScenarioLoad(benchmark::State& state) {
  setenv("CDPLUS_DATA_ROOT", CDPLUS_TEST_DATA_ROOT, 1);
  for (auto _ : state) {
    Scenario s = load("failure");
    benchmark::DoNotOptimize(s.agents.size());
  }
}
BENCHMARK(BM_ScenarioLoad);

BENCHMARK_MAIN();
