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

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bench.hpp"

using namespace retape;
using namespace retape::bench;

namespace {

BenchConfig tinyConfig() {
    BenchConfig config;
    config.grid = 9;
    config.steps = 2;
    config.repetitions = 2;
    return config;
}

std::vector<std::string> splitCsvLine(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream stream(line);
    std::string field;
    while (std::getline(stream, field, ',')) {
        fields.push_back(field);
    }
    return fields;
}

} // namespace

TEST_CASE("mode names round-trip") {
    CHECK(parseMode("none") == burgers::SimulationMode::taped);
    CHECK(parseMode("external") == burgers::SimulationMode::external);
    CHECK(std::string(modeName(burgers::SimulationMode::taped)) == "none");
    CHECK(std::string(modeName(burgers::SimulationMode::external)) == "external");
    CHECK_THROWS_AS(parseMode("taped"), Error);
}

TEST_CASE("configurations reject unusable combinations") {
    BenchConfig config = tinyConfig();
    CHECK_NOTHROW(config.validate());

    config.tape = TapeKind::jacobianReuse;
    config.handling = true;
    CHECK_THROWS_AS(config.validate(), Error);

    config = tinyConfig();
    config.format = "xml";
    CHECK_THROWS_AS(config.validate(), Error);

    config = tinyConfig();
    config.repetitions = 0;
    CHECK_THROWS_AS(config.validate(), Error);

    config = tinyConfig();
    config.grid = 0;
    CHECK_THROWS_AS(config.validate(), Error);
}

TEST_CASE("a single cell emits one well-formed CSV row") {
    const BenchConfig config = tinyConfig();
    const std::vector<BenchRecord> records = runBenchmark(config);
    REQUIRE(records.size() == 1);

    std::stringstream out;
    emitReport(records, "csv", out);

    std::string line;
    REQUIRE(std::getline(out, line));
    CHECK(line ==
          "tape,mode,handling,grid,steps,reps,record_mean_s,record_std_s,reverse_mean_s,"
          "reverse_std_s,tape_bytes,extfunc_data_bytes,high_watermark_bytes,norm,grad_checksum");
    REQUIRE(std::getline(out, line));
    const std::vector<std::string> fields = splitCsvLine(line);
    REQUIRE(fields.size() == 15);
    CHECK(fields[0] == "jacobian-linear");
    CHECK(fields[1] == "none");
    CHECK(fields[2] == "off");
    CHECK(fields[3] == "9");
    CHECK(fields[4] == "2");
    CHECK(fields[5] == "2");
    CHECK(std::stod(fields[13]) > 0.0);
    CHECK_FALSE(std::getline(out, line)); // exactly one data row
}

TEST_CASE("the JSON report mirrors the CSV fields") {
    BenchConfig config = tinyConfig();
    config.tape = TapeKind::primalValueLinear;
    config.mode = burgers::SimulationMode::external;
    config.handling = true;
    const std::vector<BenchRecord> records = runBenchmark(config);

    std::stringstream out;
    emitReport(records, "json", out);
    const nlohmann::json rows = nlohmann::json::parse(out.str());
    REQUIRE(rows.is_array());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].size() == 15);
    CHECK(rows[0]["tape"] == "primal-linear");
    CHECK(rows[0]["mode"] == "external");
    CHECK(rows[0]["handling"] == "on");
    CHECK(rows[0]["grid"] == 9);
    CHECK(rows[0]["norm"].get<double>() > 0.0);
}

TEST_CASE("the full matrix runs six cells in a fixed order") {
    BenchConfig config = tinyConfig();
    config.repetitions = 1;
    config.all = true;
    const std::vector<BenchRecord> records = runBenchmark(config);
    REQUIRE(records.size() == 6);

    const TapeKind expectedTapes[] = {TapeKind::jacobianLinear,    TapeKind::jacobianReuse,
                                      TapeKind::primalValueLinear, TapeKind::primalValueReuse,
                                      TapeKind::primalValueLinear, TapeKind::primalValueReuse};
    const bool expectedHandling[] = {false, false, false, false, true, true};
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].tape == expectedTapes[i]);
        CHECK(records[i].handling == expectedHandling[i]);
        CHECK(records[i].mode == burgers::SimulationMode::taped);

        // Every cell differentiates the same problem.
        CHECK(std::abs(records[i].norm - records[0].norm) <= 1.0e-10);
        CHECK(std::abs(records[i].gradientChecksum - records[0].gradientChecksum) <= 1.0e-10);
    }
}

TEST_CASE("measurements are deterministic apart from the clock") {
    BenchConfig config = tinyConfig();
    config.mode = burgers::SimulationMode::external;
    const BenchRecord first = runBenchmarkCell(config, TapeKind::primalValueReuse, true);
    const BenchRecord second = runBenchmarkCell(config, TapeKind::primalValueReuse, true);
    CHECK(first.norm == second.norm);
    CHECK(first.gradientChecksum == second.gradientChecksum);
    CHECK(first.tapeBytes == second.tapeBytes);
    CHECK(first.externalFunctionDataBytes == second.externalFunctionDataBytes);
    CHECK(first.highWatermarkBytes == second.highWatermarkBytes);
}

TEST_CASE("report emission validates its inputs") {
    std::stringstream out;
    CHECK_THROWS_AS(emitReport({}, "csv", out), Error);

    const std::vector<BenchRecord> records = runBenchmark(tinyConfig());
    CHECK_THROWS_AS(emitReport(records, "yaml", out), Error);
    CHECK_THROWS_AS(emitReport(records, "csv", std::string("/nonexistent/dir/report.csv")),
                    Error);
}

TEST_CASE("verification of the shipped triples succeeds") {
    BenchConfig config = tinyConfig();
    std::stringstream log;
    CHECK(runVerification(config, log));
    CHECK(log.str().find("vec-pow2: passed") != std::string::npos);
    CHECK(log.str().find("solver-step: passed") != std::string::npos);
}
