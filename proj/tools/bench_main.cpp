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

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bench.hpp"

int main(int argc, char** argv) {
    using namespace retape;
    bench::BenchConfig config;

    CLI::App app{"Coupled Burgers' recording benchmark: measures tape memory and "
                 "record/reverse time per tape variant, fully taped or with one "
                 "external-function entry per time step."};
    std::string tapeName = "jacobian-linear";
    std::string modeString = "none";
    std::string handlingString = "off";
    app.add_option("--grid", config.grid, "interior nodes per direction")
        ->capture_default_str();
    app.add_option("--steps", config.steps, "time steps")->capture_default_str();
    app.add_option("--reps", config.repetitions, "timed repetitions per cell")
        ->capture_default_str();
    app.add_option("--tape", tapeName,
                   "jacobian-linear, jacobian-reuse, primal-linear or primal-reuse")
        ->capture_default_str();
    app.add_option("--mode", modeString, "none (fully taped) or external")
        ->capture_default_str();
    app.add_option("--handling", handlingString,
                   "on gathers entry inputs from the primal vector (primal tapes only)")
        ->capture_default_str();
    app.add_option("--seed", config.seed, "seed for the verification directions")
        ->capture_default_str();
    app.add_option("--out", config.output, "report path, - for stdout")
        ->capture_default_str();
    app.add_option("--format", config.format, "csv or json")->capture_default_str();
    app.add_flag("--verify", config.verify,
                 "check the derivative triples against finite differences first");
    app.add_flag("--all", config.all, "run the full tape/handling matrix at the fixed mode");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        config.tape = parseTapeKind(tapeName);
        config.mode = bench::parseMode(modeString);
        if (handlingString == "on") {
            config.handling = true;
        } else if (handlingString != "off") {
            throw Error("bench: handling must be on or off");
        }
        if (config.all && (app.count("--tape") != 0 || app.count("--handling") != 0)) {
            throw Error("bench: --all spans all tapes, drop --tape/--handling");
        }
        config.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n' << "run with --help for usage\n";
        return 1;
    }

    try {
        if (config.verify && !bench::runVerification(config, std::cerr)) {
            std::cerr << "error: derivative verification failed\n";
            return 2;
        }
        const std::vector<bench::BenchRecord> records = bench::runBenchmark(config);
        bench::emitReport(records, config.format, config.output);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
