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

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <retape/retape.hpp>

namespace retape::bench {

struct BenchConfig {
    std::size_t grid = 599; // interior nodes per direction: 601 x 601 nodes
    std::size_t steps = 16;
    std::size_t repetitions = 20;
    TapeKind tape = TapeKind::jacobianLinear;
    burgers::SimulationMode mode = burgers::SimulationMode::taped;
    bool handling = false; // gather entry inputs from the primal vector
    std::uint64_t seed = 42;
    std::string output = "-"; // "-" writes to stdout
    std::string format = "csv";
    bool verify = false;
    bool all = false; // run the full tape/handling matrix at the fixed mode

    // Throws Error on unusable combinations (handling on a Jacobian tape,
    // unknown format, zero repetitions, or an invalid simulation setup).
    void validate() const;
};

// Measurements of one tape/mode/handling cell.
struct BenchRecord {
    TapeKind tape = TapeKind::jacobianLinear;
    burgers::SimulationMode mode = burgers::SimulationMode::taped;
    bool handling = false;
    std::size_t grid = 0;
    std::size_t steps = 0;
    std::size_t repetitions = 0;
    double recordMeanSeconds = 0.0;
    double recordStdSeconds = 0.0;
    double reverseMeanSeconds = 0.0;
    double reverseStdSeconds = 0.0;
    std::uint64_t tapeBytes = 0; // recorded tape plus external-function entries
    std::uint64_t externalFunctionDataBytes = 0;
    std::uint64_t highWatermarkBytes = 0;
    double norm = 0.0;
    double gradientChecksum = 0.0; // sum of all input gradients
};

const char* modeName(burgers::SimulationMode mode);
burgers::SimulationMode parseMode(const std::string& name); // "none" or "external"

// One cell: a warmup cycle, then `repetitions` timed record/reverse cycles
// on the same tape with a reset before each. Byte counts, norm, and checksum
// come from the final cycle; times are averaged over all timed cycles.
BenchRecord runBenchmarkCell(const BenchConfig& config, TapeKind tape, bool handling);

// The configured single cell, or with `all` the six-row matrix: both
// Jacobian tapes, both primal value tapes with handling off, then both with
// handling on, everything at the configured mode.
std::vector<BenchRecord> runBenchmark(const BenchConfig& config);

// format "csv": a header line plus one row per record with the columns
//   tape,mode,handling,grid,steps,reps,record_mean_s,record_std_s,
//   reverse_mean_s,reverse_std_s,tape_bytes,extfunc_data_bytes,
//   high_watermark_bytes,norm,grad_checksum
// format "json": an array of objects with the same field names. Rows keep
// the order of `records`. Throws Error when `records` is empty.
void emitReport(const std::vector<BenchRecord>& records, const std::string& format,
                std::ostream& out);
void emitReport(const std::vector<BenchRecord>& records, const std::string& format,
                const std::string& path);

// Stochastic consistency checks of the hand-derived derivative triples (the
// squaring example and the solver step) at the configured grid, seeded from
// config.seed. Prints one line per triple; returns whether all passed.
bool runVerification(const BenchConfig& config, std::ostream& out);

} // namespace retape::bench
