// Microbenchmarks for the hot paths: channel draws and snapshot evaluation
// (the per-task episode loop), model compilation, tensor build and the
// solvers. Run with --benchmark_filter=... to isolate one.

#include <benchmark/benchmark.h>

#include "clssr/harness.hpp"
#include "clssr/mdp.hpp"
#include "clssr/pipeline.hpp"
#include "clssr/rng.hpp"
#include "clssr/scenario.hpp"
#include "clssr/solver.hpp"

namespace {

using namespace clssr;

const Scenario& scenario() {
  static const Scenario sc = Scenario::defaults();
  return sc;
}

// Untrained semantics (delta_z = 0) exercises the same arithmetic as a
// pretrained model; these numbers are about throughput, not policy quality.
const ModelContext& context() {
  static const ModelContext ctx =
      compile_scenario(scenario(), scenario().semantic, SchemeRules{});
  return ctx;
}

const Mdp& model() {
  static const Mdp mdp = build_mdp(context());
  return mdp;
}

void BM_SampleLinks(benchmark::State& state) {
  const Scenario& sc = scenario();
  Philox4x32 rng = make_stream(1, "bench/links");
  for (auto _ : state) {
    LinkDraw draw = sample_links(rng, sc.budget, sc.geometry, sc.mode);
    benchmark::DoNotOptimize(draw);
  }
}
BENCHMARK(BM_SampleLinks);

void BM_EvaluateSnapshot(benchmark::State& state) {
  const Scenario& sc = scenario();
  const ModelContext& ctx = context();
  Philox4x32 rng = make_stream(1, "bench/snapshot");
  const LinkDraw draw = sample_links(rng, sc.budget, sc.geometry, sc.mode);
  const Beamformer& f = ctx.actions.beam_codebook.front();
  for (auto _ : state) {
    SecuritySnapshot snap = evaluate_snapshot(
        draw, f, sc.semantic.b, ctx.semantic, sc.budget, sc.mode, sc.t_max_s,
        ctx.rules);
    benchmark::DoNotOptimize(snap);
  }
}
BENCHMARK(BM_EvaluateSnapshot);

void BM_BuildQuantizers(benchmark::State& state) {
  const Scenario& sc = scenario();
  for (auto _ : state) {
    auto quantizers = build_quantizers(sc);
    benchmark::DoNotOptimize(quantizers);
  }
}
BENCHMARK(BM_BuildQuantizers);

void BM_CompileScenario(benchmark::State& state) {
  const Scenario& sc = scenario();
  for (auto _ : state) {
    ModelContext ctx = compile_scenario(sc, sc.semantic, SchemeRules{});
    benchmark::DoNotOptimize(ctx);
  }
}
BENCHMARK(BM_CompileScenario);

void BM_BuildMdp(benchmark::State& state) {
  const ModelContext& ctx = context();
  for (auto _ : state) {
    Mdp mdp = build_mdp(ctx);
    benchmark::DoNotOptimize(mdp);
  }
}
BENCHMARK(BM_BuildMdp);

void BM_PolicyIteration(benchmark::State& state) {
  const Mdp& mdp = model();
  for (auto _ : state) {
    SolveReport report = policy_iteration(mdp);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_PolicyIteration);

void BM_ValueIteration(benchmark::State& state) {
  const Mdp& mdp = model();
  for (auto _ : state) {
    ValueFn v = value_iteration(mdp);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_ValueIteration);

void BM_RunEpisode(benchmark::State& state) {
  const ModelContext& ctx = context();
  static const Policy policy = policy_iteration(model()).policy;
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto records = run_episode(ctx, policy, steps, 1);
    benchmark::DoNotOptimize(records);
  }
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_RunEpisode)->Arg(300);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  return 0;
}
