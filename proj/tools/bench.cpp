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

#include "bench.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <utility>

#include <json.hpp>

namespace retape::bench {

void BenchConfig::validate() const {
    if (handling && !isPrimalValueKind(tape)) {
        throw Error("bench: handling=on requires a primal value tape");
    }
    if (format != "csv" && format != "json") {
        throw Error("bench: format must be csv or json");
    }
    if (repetitions == 0) {
        throw Error("bench: at least one repetition is required");
    }
    burgers::BurgersConfig::make(grid, steps).validate();
}

const char* modeName(burgers::SimulationMode mode) {
    return mode == burgers::SimulationMode::taped ? "none" : "external";
}

burgers::SimulationMode parseMode(const std::string& name) {
    if (name == "none") {
        return burgers::SimulationMode::taped;
    }
    if (name == "external") {
        return burgers::SimulationMode::external;
    }
    throw Error("bench: unknown mode '" + name + "', expected none or external");
}

namespace {

struct TimeStats {
    double mean = 0.0;
    double std = 0.0;
};

TimeStats timeStats(const std::vector<double>& samples) {
    TimeStats stats;
    for (const double sample : samples) {
        stats.mean += sample;
    }
    stats.mean /= double(samples.size());
    double variance = 0.0;
    for (const double sample : samples) {
        variance += (sample - stats.mean) * (sample - stats.mean);
    }
    stats.std = std::sqrt(variance / double(samples.size()));
    return stats;
}

} // namespace

BenchRecord runBenchmarkCell(const BenchConfig& config, TapeKind kind, bool handling) {
    const burgers::BurgersConfig simulation =
        burgers::BurgersConfig::make(config.grid, config.steps);
    simulation.validate();

    auto tape = makeTape(kind);
    tape->setPrimalValueHandling(handling);

    // Warmup cycle: faults in the tape buffers and brings the caches to a
    // steady state before any timing.
    burgers::runSimulation(simulation, config.mode, *tape);

    std::vector<double> recordTimes;
    std::vector<double> reverseTimes;
    recordTimes.reserve(config.repetitions);
    reverseTimes.reserve(config.repetitions);
    burgers::SimulationResult last;
    for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
        tape->reset();
        last = burgers::runSimulation(simulation, config.mode, *tape);
        recordTimes.push_back(last.recordSeconds);
        reverseTimes.push_back(last.reverseSeconds);
    }

    BenchRecord record;
    record.tape = kind;
    record.mode = config.mode;
    record.handling = handling;
    record.grid = config.grid;
    record.steps = config.steps;
    record.repetitions = config.repetitions;
    const TimeStats recordStats = timeStats(recordTimes);
    const TimeStats reverseStats = timeStats(reverseTimes);
    record.recordMeanSeconds = recordStats.mean;
    record.recordStdSeconds = recordStats.std;
    record.reverseMeanSeconds = reverseStats.mean;
    record.reverseStdSeconds = reverseStats.std;
    record.tapeBytes = last.statistics.tapeMemoryBytes() + last.statistics.externalFunctionBytes;
    record.externalFunctionDataBytes = last.statistics.externalFunctionDataBytes;
    record.highWatermarkBytes = last.statistics.highWatermarkBytes;
    record.norm = last.norm;
    for (const double gradient : last.gradients) {
        record.gradientChecksum += gradient;
    }
    return record;
}

std::vector<BenchRecord> runBenchmark(const BenchConfig& config) {
    config.validate();
    std::vector<std::pair<TapeKind, bool>> cells;
    if (config.all) {
        cells = {{TapeKind::jacobianLinear, false},   {TapeKind::jacobianReuse, false},
                 {TapeKind::primalValueLinear, false}, {TapeKind::primalValueReuse, false},
                 {TapeKind::primalValueLinear, true},  {TapeKind::primalValueReuse, true}};
    } else {
        cells = {{config.tape, config.handling}};
    }

    std::vector<BenchRecord> records;
    records.reserve(cells.size());
    for (const auto& [kind, handling] : cells) {
        try {
            records.push_back(runBenchmarkCell(config, kind, handling));
        } catch (const std::exception& e) {
            throw Error(std::string("bench: cell ") + tapeKindName(kind) + "/" +
                        modeName(config.mode) + "/handling=" + (handling ? "on" : "off") +
                        " failed: " + e.what());
        }
    }
    return records;
}

namespace {

void emitCsv(const std::vector<BenchRecord>& records, std::ostream& out) {
    out << "tape,mode,handling,grid,steps,reps,record_mean_s,record_std_s,"
           "reverse_mean_s,reverse_std_s,tape_bytes,extfunc_data_bytes,"
           "high_watermark_bytes,norm,grad_checksum\n";
    out << std::setprecision(17);
    for (const BenchRecord& r : records) {
        out << tapeKindName(r.tape) << ',' << modeName(r.mode) << ','
            << (r.handling ? "on" : "off") << ',' << r.grid << ',' << r.steps << ','
            << r.repetitions << ',' << r.recordMeanSeconds << ',' << r.recordStdSeconds << ','
            << r.reverseMeanSeconds << ',' << r.reverseStdSeconds << ',' << r.tapeBytes << ','
            << r.externalFunctionDataBytes << ',' << r.highWatermarkBytes << ',' << r.norm << ','
            << r.gradientChecksum << '\n';
    }
}

void emitJson(const std::vector<BenchRecord>& records, std::ostream& out) {
    nlohmann::json rows = nlohmann::json::array();
    for (const BenchRecord& r : records) {
        rows.push_back({{"tape", tapeKindName(r.tape)},
                        {"mode", modeName(r.mode)},
                        {"handling", r.handling ? "on" : "off"},
                        {"grid", r.grid},
                        {"steps", r.steps},
                        {"reps", r.repetitions},
                        {"record_mean_s", r.recordMeanSeconds},
                        {"record_std_s", r.recordStdSeconds},
                        {"reverse_mean_s", r.reverseMeanSeconds},
                        {"reverse_std_s", r.reverseStdSeconds},
                        {"tape_bytes", r.tapeBytes},
                        {"extfunc_data_bytes", r.externalFunctionDataBytes},
                        {"high_watermark_bytes", r.highWatermarkBytes},
                        {"norm", r.norm},
                        {"grad_checksum", r.gradientChecksum}});
    }
    out << rows.dump(2) << '\n';
}

} // namespace

void emitReport(const std::vector<BenchRecord>& records, const std::string& format,
                std::ostream& out) {
    if (records.empty()) {
        throw Error("emitReport: no records");
    }
    if (format == "csv") {
        emitCsv(records, out);
    } else if (format == "json") {
        emitJson(records, out);
    } else {
        throw Error("emitReport: format must be csv or json");
    }
    if (!out) {
        throw Error("emitReport: write failed");
    }
}

void emitReport(const std::vector<BenchRecord>& records, const std::string& format,
                const std::string& path) {
    if (path == "-") {
        emitReport(records, format, std::cout);
        return;
    }
    std::ofstream file(path);
    if (!file) {
        throw Error("emitReport: cannot open '" + path + "'");
    }
    emitReport(records, format, file);
}

bool runVerification(const BenchConfig& config, std::ostream& out) {
    auto describe = [&out](const char* name, const VerificationReport& report) {
        out << "verify " << name << ": " << (report.passed ? "passed" : "FAILED")
            << " (forward " << report.maxForwardRelativeError << ", dot residual "
            << report.maxDotProductResidual << ", " << report.trials << " trials)\n";
    };

    std::vector<double> squares(10);
    for (std::size_t i = 0; i < squares.size(); ++i) {
        squares[i] = double(i + 1);
    }
    const VerificationReport squaresReport = verifyDerivativeTriple(
        vecPow2Triple(), squares, UserDataStore{}, squares.size(), 20, config.seed);
    describe("vec-pow2", squaresReport);

    const burgers::BurgersConfig simulation =
        burgers::BurgersConfig::make(config.grid, config.steps);
    simulation.validate();
    const burgers::FieldPair<double> state = burgers::initializeFields(simulation);
    // Jitter away from the affine exact data so every stencil partial sees
    // generic values.
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> jitter(-0.1, 0.1);
    std::vector<double> x;
    x.reserve(2 * simulation.nodeCount());
    for (const std::vector<double>* field : {&state.u, &state.v}) {
        for (const double value : *field) {
            x.push_back(value + jitter(rng));
        }
    }
    UserDataStore data;
    data.addData(simulation.nx);
    data.addData(simulation.ny);
    data.addData(simulation.dTbyDX());
    data.addData(simulation.dTbyDX2());
    data.addData(simulation.oneOverR());
    const VerificationReport stepReport =
        verifyDerivativeTriple(burgers::updateFieldTriple(), x, std::move(data),
                               2 * simulation.interiorCount(), 20, config.seed);
    describe("solver-step", stepReport);

    return squaresReport.passed && stepReport.passed;
}

} // namespace retape::bench
