// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License.  You
// may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied.  See the License for the specific language governing
// permissions and limitations under the License.

// Microbenchmarks for the hot paths: statement recording, reverse sweeps,
// and the two differentiable forms of the solver step. Run them directly;
// they are not part of the test suite.

#include <benchmark/benchmark.h>

#include <cstddef>
#include <memory>

#include <retape/retape.hpp>

using namespace retape;

namespace {

constexpr std::size_t chainLength = 1 << 14;

// a = a * x + 0.25 repeated: one binary and one constant statement per turn.
ActiveScalar recordChain(Tape& tape, ActiveScalar& x) {
    ActiveScalar a = x;
    for (std::size_t i = 0; i < chainLength; ++i) {
        a = a * x + 0.25;
    }
    tape.registerOutput(a);
    return a;
}

void recordStatements(benchmark::State& state) {
    auto tape = makeTape(TapeKind(state.range(0)));
    for (auto _ : state) {
        tape->reset();
        tape->setRecording(true);
        ActiveScalar x = 1.000001;
        tape->registerInput(x);
        ActiveScalar a = recordChain(*tape, x);
        tape->setRecording(false);
        benchmark::DoNotOptimize(a.value());
    }
    state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(2 * chainLength));
}

void reverseSweep(benchmark::State& state) {
    auto tape = makeTape(TapeKind(state.range(0)));
    tape->setRecording(true);
    ActiveScalar x = 1.000001;
    tape->registerInput(x);
    ActiveScalar a = recordChain(*tape, x);
    tape->setRecording(false);
    for (auto _ : state) {
        a.setGradient(1.0);
        tape->evaluate();
        benchmark::DoNotOptimize(x.gradient());
    }
    state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(2 * chainLength));
}

void solverStep(benchmark::State& state) {
    const burgers::BurgersConfig config = burgers::BurgersConfig::make(65, 4);
    const TapeKind kind = TapeKind(state.range(0));
    const burgers::SimulationMode mode = state.range(1) == 0
                                             ? burgers::SimulationMode::taped
                                             : burgers::SimulationMode::external;
    double recordSeconds = 0.0;
    double reverseSeconds = 0.0;
    for (auto _ : state) {
        const burgers::SimulationResult result = burgers::runSimulation(config, mode, kind);
        recordSeconds += result.recordSeconds;
        reverseSeconds += result.reverseSeconds;
        benchmark::DoNotOptimize(result.norm);
    }
    state.counters["record_s"] =
        benchmark::Counter(recordSeconds / double(state.iterations()));
    state.counters["reverse_s"] =
        benchmark::Counter(reverseSeconds / double(state.iterations()));
}

void tapeKindArgs(benchmark::internal::Benchmark* bench) {
    for (int kind = 0; kind < 4; ++kind) {
        bench->Arg(kind);
    }
}

void solverArgs(benchmark::internal::Benchmark* bench) {
    for (int kind = 0; kind < 4; ++kind) {
        for (int mode = 0; mode < 2; ++mode) {
            bench->Args({kind, mode});
        }
    }
}

BENCHMARK(recordStatements)->Apply(tapeKindArgs)->Unit(benchmark::kMicrosecond);
BENCHMARK(reverseSweep)->Apply(tapeKindArgs)->Unit(benchmark::kMicrosecond);
// Arg order: tape kind 0..3, then 0 = fully taped / 1 = external entry.
BENCHMARK(solverStep)->Apply(solverArgs)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
