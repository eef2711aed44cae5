#include <benchmark/benchmark.h>

#include "gazelink/distributions.hpp"
#include "gazelink/linking.hpp"
#include "gazelink/signal.hpp"
#include "gazelink/synth.hpp"

namespace {

using namespace gazelink;

const synth::SynthStudy& one_session() {
    static const synth::SynthStudy study = [] {
        synth::SynthSpec spec;
        spec.subjects = 1;
        spec.seed = 42;
        return synth::generate_study(spec);
    }();
    return study;
}

void BM_DetectFixations(benchmark::State& state) {
    const auto& s = one_session().sessions.front().session;
    for (auto _ : state) benchmark::DoNotOptimize(detect_fixations(s.gaze, s.scroll));
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * s.gaze.size()));
}
BENCHMARK(BM_DetectFixations);

void BM_LinkSession(benchmark::State& state) {
    const auto& study = one_session();
    const auto& s = study.sessions.front().session;
    const auto fx = detect_fixations(s.gaze, s.scroll);
    LinkConfig config;
    config.gaze_evidence = state.range(0) ? GazeEvidence::raw_samples : GazeEvidence::fixations;
    for (auto _ : state) benchmark::DoNotOptimize(link_session(s, study.stimuli.front(), fx, config));
    state.SetLabel(state.range(0) ? "raw samples" : "fixations");
}
BENCHMARK(BM_LinkSession)->Arg(0)->Arg(1);

void BM_GenerateStudy(benchmark::State& state) {
    synth::SynthSpec spec;
    spec.subjects = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(synth::generate_study(spec));
}
BENCHMARK(BM_GenerateStudy)->Arg(1)->Arg(10);

void BM_IncompleteBeta(benchmark::State& state) {
    double x = 0.0;
    for (auto _ : state) {
        x = x >= 0.99 ? 0.01 : x + 0.01;
        benchmark::DoNotOptimize(stats::regularized_incomplete_beta(4.5, 0.5, x));
    }
}
BENCHMARK(BM_IncompleteBeta);

void BM_StudentTPValue(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(stats::student_t_two_tailed_p(4.3, 9));
}
BENCHMARK(BM_StudentTPValue);

}  // namespace

BENCHMARK_MAIN();
