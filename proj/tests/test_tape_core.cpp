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
#include <random>
#include <vector>

#include <retape/retape.hpp>

using namespace retape;

namespace {

constexpr TapeKind allKinds[] = {TapeKind::jacobianLinear, TapeKind::jacobianReuse,
                                 TapeKind::primalValueLinear, TapeKind::primalValueReuse};

} // namespace

TEST_CASE("squaring a registered input yields its derivative") {
    for (const TapeKind kind : allKinds) {
        CAPTURE(tapeKindName(kind));
        auto tape = makeTape(kind);
        tape->setRecording(true);
        ActiveScalar x = 3.0;
        tape->registerInput(x);
        ActiveScalar y = x * x;
        tape->registerOutput(y);
        tape->setRecording(false);

        CHECK(y.value() == 9.0);
        y.setGradient(1.0);
        tape->evaluate();
        CHECK(x.gradient() == 6.0);
        // The interior result's adjoint was consumed by the sweep.
        CHECK(tape->getGradient(y) == 0.0);
    }
}

TEST_CASE("a value feeding two statements accumulates both contributions") {
    for (const TapeKind kind : allKinds) {
        CAPTURE(tapeKindName(kind));
        auto tape = makeTape(kind);
        tape->setRecording(true);
        ActiveScalar x = 2.0;
        tape->registerInput(x);
        ActiveScalar y = x * x;
        ActiveScalar z = y + x;
        tape->registerOutput(z);
        tape->setRecording(false);

        z.setGradient(1.0);
        tape->evaluate();
        CHECK(x.gradient() == 5.0); // 2 x + 1 at x = 2
    }
}

TEST_CASE("two outputs of one input accumulate their seeds") {
    for (const TapeKind kind : allKinds) {
        CAPTURE(tapeKindName(kind));
        auto tape = makeTape(kind);
        tape->setRecording(true);
        ActiveScalar x = 7.0;
        tape->registerInput(x);
        ActiveScalar y1 = x;
        ActiveScalar y2 = x;
        tape->registerOutput(y1);
        tape->registerOutput(y2);
        tape->setRecording(false);

        y1.setGradient(1.0);
        y2.setGradient(1.0);
        tape->evaluate();
        CHECK(x.gradient() == 2.0);
    }
}

TEST_CASE("recording toggles control statement creation") {
    auto tape = makeTape(TapeKind::jacobianLinear);
    tape->setRecording(true);
    ActiveScalar x = 1.5;
    tape->registerInput(x);
    const Position before = tape->position();

    tape->setRecording(false);
    ActiveScalar y = x * x;
    CHECK(y.identifier() == passiveId);
    CHECK(tape->position() == before);

    // Resumes appending at the same position.
    tape->setRecording(true);
    ActiveScalar z = x * x;
    CHECK(z.identifier() != passiveId);
    CHECK(tape->position().statement == before.statement + 1);
}

TEST_CASE("linear index management hands out consecutive identifiers") {
    auto tape = makeTape(TapeKind::jacobianLinear);
    tape->setRecording(true);
    std::vector<ActiveScalar> values(10, ActiveScalar(1.0));
    for (std::size_t i = 0; i < values.size(); ++i) {
        tape->registerInput(values[i]);
        CHECK(values[i].identifier() == Identifier(i + 1));
        CHECK(values[i].gradient() == 0.0);
    }
}

TEST_CASE("reuse index management recycles freed identifiers") {
    auto tape = makeTape(TapeKind::jacobianReuse);
    tape->setRecording(true);
    ActiveScalar x = 1.0;
    tape->registerInput(x);

    Identifier freed = passiveId;
    {
        ActiveScalar temporary = x * x;
        freed = temporary.identifier();
        CHECK(freed != passiveId);
    }
    ActiveScalar y = x + 1.0;
    CHECK(y.identifier() == freed);
}

TEST_CASE("registration requires recording and activity") {
    auto tape = makeTape(TapeKind::jacobianLinear);
    ActiveScalar x = 1.0;
    CHECK_THROWS_AS(tape->registerInput(x), Error);

    tape->setRecording(true);
    ActiveScalar passive = 2.0;
    CHECK_THROWS_AS(tape->registerOutput(passive), Error);
}

TEST_CASE("operations on passive values stay passive") {
    auto tape = makeTape(TapeKind::primalValueLinear);
    tape->setRecording(true);
    ActiveScalar a = 2.0;
    ActiveScalar b = 3.0;
    const Position before = tape->position();
    ActiveScalar c = a * b + sin(a);
    CHECK(c.identifier() == passiveId);
    CHECK(c.value() == 6.0 + std::sin(2.0));
    CHECK(tape->position() == before);
}

TEST_CASE("recordStatement stores caller partials and drops passive arguments") {
    for (const TapeKind kind : allKinds) {
        CAPTURE(tapeKindName(kind));
        auto tape = makeTape(kind);
        tape->setRecording(true);
        ActiveScalar x1 = 3.0;
        ActiveScalar x2 = 4.0;
        tape->registerInput(x1);
        tape->registerInput(x2);

        // y = x1 * x2 expressed through the statement interface.
        ActiveScalar y;
        tape->recordStatement(y, {{x1.identifier(), 4.0}, {x2.identifier(), 3.0}}, 12.0);
        CHECK(y.value() == 12.0);
        CHECK(y.identifier() != passiveId);

        // Passive arguments are dropped before storage.
        ActiveScalar z;
        tape->recordStatement(z, {{x1.identifier(), 2.0}, {passiveId, 100.0}}, 1.0);

        // No active arguments at all: the result is passive, no record.
        const Position before = tape->position();
        ActiveScalar w;
        tape->recordStatement(w, {{passiveId, 1.0}}, 5.0);
        CHECK(w.identifier() == passiveId);
        CHECK(w.value() == 5.0);
        CHECK(tape->position() == before);

        tape->registerOutput(y);
        tape->registerOutput(z);
        y.setGradient(1.0);
        z.setGradient(1.0);
        tape->evaluate();
        CHECK(x1.gradient() == 6.0); // 4 from y, 2 from z
        CHECK(x2.gradient() == 3.0);
    }
}

TEST_CASE("recordStatement rejects more than 255 active arguments") {
    auto tape = makeTape(TapeKind::jacobianLinear);
    tape->setRecording(true);
    ActiveScalar x = 1.0;
    tape->registerInput(x);
    std::vector<std::pair<Identifier, double>> args(256, {x.identifier(), 1.0});
    ActiveScalar y;
    CHECK_THROWS_AS(tape->recordStatement(y, args.data(), args.size(), 0.0), Error);
    args.resize(255);
    CHECK_NOTHROW(tape->recordStatement(y, args.data(), args.size(), 255.0));
    tape->registerOutput(y);
    y.setGradient(1.0);
    tape->evaluate();
    CHECK(x.gradient() == 255.0);
}

TEST_CASE("copy assignment shares identifiers only under reuse management") {
    SUBCASE("reuse tape with copy optimization appends nothing") {
        auto tape = makeTape(TapeKind::jacobianReuse);
        tape->setRecording(true);
        ActiveScalar a = 2.0;
        tape->registerInput(a);
        const Position before = tape->position();
        ActiveScalar b = a;
        CHECK(tape->position() == before);
        CHECK(b.identifier() == a.identifier());

        // Overwriting the source must not invalidate the copy: the shared
        // identifier stays referenced.
        const Identifier shared = a.identifier();
        a = 99.0;
        CHECK(b.identifier() == shared);
        ActiveScalar fresh = b * 1.0;
        CHECK(fresh.identifier() != shared);
    }

    SUBCASE("linear tape records a unit-partial statement") {
        auto tape = makeTape(TapeKind::jacobianLinear);
        tape->setRecording(true);
        ActiveScalar a = 2.0;
        tape->registerInput(a);
        const Position before = tape->position();
        ActiveScalar b = a;
        CHECK(tape->position().statement == before.statement + 1);
        CHECK(b.identifier() != a.identifier());
    }
}

TEST_CASE("copy optimization does not change gradients") {
    for (const TapeKind kind : {TapeKind::jacobianReuse, TapeKind::primalValueReuse}) {
        CAPTURE(tapeKindName(kind));
        double gradients[2][2];
        std::uint64_t statements[2];
        for (const bool optimized : {true, false}) {
            auto tape = makeTape(kind);
            tape->setCopyOptimization(optimized);
            tape->setRecording(true);
            ActiveScalar x = 1.25;
            ActiveScalar y = -0.5;
            tape->registerInput(x);
            tape->registerInput(y);
            ActiveScalar a = x * y;
            ActiveScalar b = a;  // copy
            ActiveScalar c = b * b + x;
            b = y;               // copy onto an existing value
            ActiveScalar d = c + b;
            tape->registerOutput(d);
            tape->setRecording(false);
            d.setGradient(1.0);
            tape->evaluate();
            gradients[optimized ? 0 : 1][0] = x.gradient();
            gradients[optimized ? 0 : 1][1] = y.gradient();
            statements[optimized ? 0 : 1] = tape->statistics().statementCount;
        }
        CHECK(gradients[0][0] == doctest::Approx(gradients[1][0]).epsilon(1e-15));
        CHECK(gradients[0][1] == doctest::Approx(gradients[1][1]).epsilon(1e-15));
        // The optimized recording saved the two copy statements.
        CHECK(statements[0] + 2 == statements[1]);
    }
}

TEST_CASE("gradient seeds round-trip and accumulate") {
    auto tape = makeTape(TapeKind::primalValueReuse);
    tape->setRecording(true);
    ActiveScalar x = 1.0;
    tape->registerInput(x);
    ActiveScalar y = x * 2.0;
    tape->registerOutput(y);

    y.setGradient(2.5);
    CHECK(y.gradient() == 2.5);
    y.setGradient(0.5);
    CHECK(y.gradient() == 3.0);

    ActiveScalar passive = 4.0;
    CHECK(passive.gradient() == 0.0);
    CHECK_THROWS_AS(tape->setGradient(passive, 1.0), Error);
}

TEST_CASE("evaluate validates the recorded range") {
    auto tape = makeTape(TapeKind::jacobianLinear);
    CHECK_THROWS_AS(tape->evaluate(), Error);

    tape->setRecording(true);
    ActiveScalar x = 2.0;
    tape->registerInput(x);
    ActiveScalar y = x * x;
    const Position end = tape->position();
    Position beyond = end;
    beyond.statement += 1;
    CHECK_THROWS_AS(tape->evaluateReverse(beyond, Position{}), Error);
    CHECK_THROWS_AS(tape->evaluateReverse(Position{}, end), Error);
}

TEST_CASE("evaluate consumes seeds according to the index mode") {
    for (const TapeKind kind : allKinds) {
        CAPTURE(tapeKindName(kind));
        auto tape = makeTape(kind);
        tape->setRecording(true);
        ActiveScalar x = 0.75;
        tape->registerInput(x);
        ActiveScalar y = exp(x * x);
        tape->registerOutput(y);
        tape->setRecording(false);

        y.setGradient(1.0);
        tape->evaluate();
        const double first = x.gradient();
        CHECK(first == doctest::Approx(2.0 * 0.75 * std::exp(0.75 * 0.75)));

        // A sweep without fresh seeds propagates nothing. Linear tapes also
        // clear the input slots up front, so every call reports exactly its
        // own seeds' gradients; reuse tapes must leave the slots alone
        // (under copy optimization an output can alias an input) and
        // therefore accumulate across calls.
        tape->evaluate();
        if (isReuseKind(kind)) {
            CHECK(x.gradient() == first);
        } else {
            CHECK(x.gradient() == 0.0);
        }

        y.setGradient(1.0);
        tape->evaluate();
        if (isReuseKind(kind)) {
            CHECK(x.gradient() == doctest::Approx(2.0 * first).epsilon(1.0e-15));
        } else {
            CHECK(x.gradient() == first); // same sweep from zeroed slots
        }
    }
}

TEST_CASE("partial reverse sweeps propagate between positions") {
    for (const TapeKind kind : allKinds) {
        CAPTURE(tapeKindName(kind));
        auto tape = makeTape(kind);
        tape->setRecording(true);
        ActiveScalar x = 1.5;
        tape->registerInput(x);
        ActiveScalar y = x * x;
        const Position mid = tape->position();
        ActiveScalar z = y * y;
        tape->registerOutput(z);
        const Position end = tape->position();
        tape->setRecording(false);

        // Sweep the second half only: the adjoint arrives at y.
        tape->setGradient(z, 1.0);
        tape->evaluateReverse(end, mid);
        CHECK(tape->getGradient(y) == 2.0 * y.value());

        // Sweeping the first half completes the chain rule.
        tape->evaluateReverse(mid, Position{});
        CHECK(x.gradient() == 4.0 * x.value() * x.value() * x.value());
    }
}

TEST_CASE("statement and argument byte accounting follows the storage layout") {
    // Hand-built program: one registered input (zero-argument reservation),
    // one three-argument statement, one two-argument statement. k = 3
    // statements, a = 5 stored arguments.
    for (const TapeKind kind : allKinds) {
        CAPTURE(tapeKindName(kind));
        auto tape = makeTape(kind);
        tape->setRecording(true);
        ActiveScalar x = 2.0;
        tape->registerInput(x);
        ActiveScalar y;
        tape->recordStatement(
            y, {{x.identifier(), 1.0}, {x.identifier(), 2.0}, {x.identifier(), 3.0}}, 6.0);
        ActiveScalar z = y * x;
        tape->registerOutput(z);

        const TapeStatistics stats = tape->statistics();
        CHECK(stats.statementCount == 3);
        CHECK(stats.argumentCount == 5);

        const bool reuse = isReuseKind(kind);
        if (!isPrimalValueKind(kind)) {
            CHECK(stats.statementBytes == 3 * 1);
            CHECK(stats.jacobianBytes == 5 * 8);
            CHECK(stats.identifierBytes == 5 * 4 + (reuse ? 3 * 4 : 0));
            CHECK(stats.primalVectorBytes == 0);
        } else {
            // Three stored constants: the explicit statement keeps its three
            // partials; mul stores none.
            CHECK(stats.statementBytes == 3 * (1 + 2) + 3 * 8 + (reuse ? 3 * 8 : 0));
            CHECK(stats.jacobianBytes == 0);
            CHECK(stats.identifierBytes == 5 * 4 + (reuse ? 3 * 4 : 0));
            // Identifiers 1..3 are live, so the primal vector spans 4 slots.
            CHECK(stats.primalVectorBytes == 4 * 8);
        }
        CHECK(stats.externalFunctionBytes == 0);
        CHECK(stats.externalFunctionDataBytes == 0);

        z.setGradient(1.0);
        tape->evaluate();
        // d/dx of (1+2+3)x * x at the recorded primals: y = 6 (partials are
        // frozen), z = y*x, so dz/dx = y + 6 x = 18.
        CHECK(x.gradient() == 18.0);
    }
}

TEST_CASE("an empty tape reports all-zero statistics") {
    for (const TapeKind kind : allKinds) {
        const auto tape = makeTape(kind);
        const TapeStatistics stats = tape->statistics();
        CHECK(stats.statementBytes == 0);
        CHECK(stats.jacobianBytes == 0);
        CHECK(stats.identifierBytes == 0);
        CHECK(stats.primalVectorBytes == 0);
        CHECK(stats.externalFunctionBytes == 0);
        CHECK(stats.externalFunctionDataBytes == 0);
        CHECK(stats.highWatermarkBytes == 0);
        CHECK(stats.statementCount == 0);
        CHECK(stats.argumentCount == 0);
        CHECK(stats.tapeMemoryBytes() == 0);
    }
}

TEST_CASE("reset drops recordings but keeps the high watermark") {
    for (const TapeKind kind : allKinds) {
        CAPTURE(tapeKindName(kind));
        auto tape = makeTape(kind);
        const auto record = [&tape] {
            tape->setRecording(true);
            ActiveScalar x = 0.3;
            tape->registerInput(x);
            ActiveScalar y = 1.0;
            for (int i = 0; i < 1000; ++i) {
                y = y + x * y;
            }
            tape->registerOutput(y);
            tape->setRecording(false);
            y.setGradient(1.0);
            tape->evaluate();
            return x.gradient();
        };

        const double firstGradient = record();
        const TapeStatistics first = tape->statistics();
        CHECK(first.highWatermarkBytes > 0);

        tape->reset();
        const TapeStatistics afterReset = tape->statistics();
        CHECK(afterReset.statementCount == 0);
        CHECK(afterReset.tapeMemoryBytes() == 0);
        CHECK(afterReset.highWatermarkBytes == first.highWatermarkBytes);
        CHECK_THROWS_AS(tape->evaluate(), Error);

        // Re-recording the same program reproduces byte counts and results.
        const double secondGradient = record();
        const TapeStatistics second = tape->statistics();
        CHECK(secondGradient == firstGradient);
        CHECK(second.statementBytes == first.statementBytes);
        CHECK(second.jacobianBytes == first.jacobianBytes);
        CHECK(second.identifierBytes == first.identifierBytes);
        CHECK(second.primalVectorBytes == first.primalVectorBytes);
        CHECK(second.statementCount == first.statementCount);
        CHECK(second.argumentCount == first.argumentCount);
        CHECK(second.highWatermarkBytes == first.highWatermarkBytes);
    }
}

TEST_CASE("primal value tapes restore their primal vector after evaluate") {
    // Heavy identifier churn so the reuse tape overwrites many primal slots;
    // a bitwise-identical second sweep proves the forward restore pass undid
    // every swap.
    auto tape = makeTape(TapeKind::primalValueReuse);
    tape->setRecording(true);
    ActiveScalar x = 1.1;
    ActiveScalar y = -0.4;
    tape->registerInput(x);
    tape->registerInput(y);
    ActiveScalar sum = 0.0;
    for (int i = 0; i < 50; ++i) {
        ActiveScalar t = sin(x * double(i + 1)) * cos(y) + x / (y + 2.0);
        sum += t * t;
    }
    tape->registerOutput(sum);
    tape->setRecording(false);

    sum.setGradient(1.0);
    tape->evaluate();
    const double gx = x.gradient();
    const double gy = y.gradient();

    // Cancel the accumulated seeds so the second sweep starts from zero
    // adjoints again: with the primal vector restored bitwise it must then
    // reproduce the first gradients bitwise.
    x.setGradient(-gx);
    y.setGradient(-gy);
    sum.setGradient(1.0);
    tape->evaluate();
    CHECK(x.gradient() == gx);
    CHECK(y.gradient() == gy);
}

// ---- randomized straight-line programs checked against finite differences

namespace {

enum class OpKind {
    add,
    sub,
    mul,
    div,
    sink,   // v[a] + v[b] via compound +=
    neg,
    sinOp,
    cosOp,
    expOp,
    sqrtOp,
    absOp,
    powOp,
    maxOp,
    copyOp,
    addConst,
    mulConst,
};

struct ProgramOp {
    OpKind kind;
    std::size_t a = 0;
    std::size_t b = 0;
    double constant = 0.0;
};

struct Program {
    std::size_t inputCount;
    std::vector<ProgramOp> ops;
};

// Generates a random straight-line program. Operation choices are guarded
// against singularities using the primal values at the base point and then
// frozen, so finite-difference replays never flip a branch.
Program makeProgram(std::mt19937& rng, std::size_t inputCount, std::size_t length,
                    const std::vector<double>& baseInputs) {
    std::uniform_real_distribution<double> constant(-1.5, 1.5);
    Program program{inputCount, {}};
    std::vector<double> values = baseInputs;

    const auto pick = [&](std::size_t bound) {
        return std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng);
    };

    while (program.ops.size() < length) {
        ProgramOp op;
        op.kind = OpKind(pick(16));
        op.a = pick(values.size());
        op.b = pick(values.size());
        op.constant = constant(rng);
        const double a = values[op.a];
        const double b = values[op.b];

        double result = 0.0;
        switch (op.kind) {
        case OpKind::add:
            result = a + b;
            break;
        case OpKind::sub:
            result = a - b;
            break;
        case OpKind::mul:
            result = a * b;
            break;
        case OpKind::div:
            if (std::abs(b) < 0.4) {
                continue;
            }
            result = a / b;
            break;
        case OpKind::sink:
            result = a + b;
            break;
        case OpKind::neg:
            result = -a;
            break;
        case OpKind::sinOp:
            result = std::sin(a);
            break;
        case OpKind::cosOp:
            result = std::cos(a);
            break;
        case OpKind::expOp:
            if (std::abs(a) > 2.0) {
                continue;
            }
            result = std::exp(a);
            break;
        case OpKind::sqrtOp:
            if (a < 0.2) {
                continue;
            }
            result = std::sqrt(a);
            break;
        case OpKind::absOp:
            if (std::abs(a) < 1e-3) {
                continue;
            }
            result = std::abs(a);
            break;
        case OpKind::powOp:
            if (a < 0.2) {
                continue;
            }
            op.constant = 1.0 + std::abs(op.constant);
            result = std::pow(a, op.constant);
            break;
        case OpKind::maxOp:
            if (std::abs(a - b) < 1e-3) {
                continue;
            }
            result = std::max(a, b);
            break;
        case OpKind::copyOp:
            result = a;
            break;
        case OpKind::addConst:
            result = a + op.constant;
            break;
        case OpKind::mulConst:
            result = a * op.constant;
            break;
        }
        if (!std::isfinite(result) || std::abs(result) > 50.0) {
            continue;
        }
        values.push_back(result);
        program.ops.push_back(op);
    }
    return program;
}

// Replays a frozen program; the output is the sum of every produced value so
// each intermediate contributes to the adjoint flow.
template <typename T>
T replayProgram(const Program& program, const std::vector<T>& inputs) {
    using std::abs;
    using std::cos;
    using std::exp;
    using std::max;
    using std::pow;
    using std::sin;
    using std::sqrt;

    std::vector<T> values(inputs.begin(), inputs.end());
    values.reserve(inputs.size() + program.ops.size());
    for (const ProgramOp& op : program.ops) {
        const T& a = values[op.a];
        const T& b = values[op.b];
        T result;
        switch (op.kind) {
        case OpKind::add:
            result = a + b;
            break;
        case OpKind::sub:
            result = a - b;
            break;
        case OpKind::mul:
            result = a * b;
            break;
        case OpKind::div:
            result = a / b;
            break;
        case OpKind::sink:
            result = a;
            result += b;
            break;
        case OpKind::neg:
            result = -a;
            break;
        case OpKind::sinOp:
            result = sin(a);
            break;
        case OpKind::cosOp:
            result = cos(a);
            break;
        case OpKind::expOp:
            result = exp(a);
            break;
        case OpKind::sqrtOp:
            result = sqrt(a);
            break;
        case OpKind::absOp:
            result = abs(a);
            break;
        case OpKind::powOp:
            result = pow(a, op.constant);
            break;
        case OpKind::maxOp:
            result = max(a, b);
            break;
        case OpKind::copyOp:
            result = a;
            break;
        case OpKind::addConst:
            result = a + op.constant;
            break;
        case OpKind::mulConst:
            result = a * op.constant;
            break;
        }
        values.push_back(std::move(result));
    }

    T output = 0.0;
    for (const T& value : values) {
        output += value;
    }
    return output;
}

} // namespace

TEST_CASE("random programs differentiate consistently on every tape kind") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> inputDist(-2.0, 2.0);

    for (int round = 0; round < 25; ++round) {
        CAPTURE(round);
        const std::size_t inputCount = 4;
        std::vector<double> baseInputs(inputCount);
        for (double& value : baseInputs) {
            value = inputDist(rng);
        }
        const Program program = makeProgram(rng, inputCount, 60, baseInputs);

        const double primal = replayProgram(program, baseInputs);

        // Finite-difference reference gradient.
        std::vector<double> reference(inputCount);
        for (std::size_t i = 0; i < inputCount; ++i) {
            const double h = 1e-6 * std::max(1.0, std::abs(baseInputs[i]));
            std::vector<double> shifted = baseInputs;
            shifted[i] = baseInputs[i] + h;
            const double plus = replayProgram(program, shifted);
            shifted[i] = baseInputs[i] - h;
            const double minus = replayProgram(program, shifted);
            reference[i] = (plus - minus) / (2.0 * h);
        }

        for (const TapeKind kind : allKinds) {
            CAPTURE(tapeKindName(kind));
            auto tape = makeTape(kind);
            tape->setRecording(true);
            std::vector<ActiveScalar> inputs(baseInputs.begin(), baseInputs.end());
            for (ActiveScalar& input : inputs) {
                tape->registerInput(input);
            }
            ActiveScalar output = replayProgram(program, inputs);
            tape->registerOutput(output);
            tape->setRecording(false);

            // Taped primal must match the double replay bitwise.
            CHECK(output.value() == primal);

            output.setGradient(1.0);
            tape->evaluate();
            for (std::size_t i = 0; i < inputCount; ++i) {
                const double gradient = inputs[i].gradient();
                const double scale = std::max(1.0, std::abs(reference[i]));
                CHECK(std::abs(gradient - reference[i]) / scale <= 1e-5);
            }
        }
    }
}

TEST_CASE("user data is a typed FIFO with rewind") {
    UserDataStore store;
    store.addData(std::size_t{599});
    store.addData(0.25);
    store.addData(std::int32_t{-7});
    store.addData(std::int64_t{1} << 40);
    CHECK(store.count() == 4);
    CHECK(store.byteSize() == 8 + 8 + 4 + 8);

    CHECK(store.getData<std::size_t>() == 599);
    CHECK(store.getData<double>() == 0.25);
    CHECK(store.getData<std::int32_t>() == -7);
    CHECK(store.getData<std::int64_t>() == std::int64_t{1} << 40);
    CHECK_THROWS_AS(store.getData<double>(), Error);

    store.rewind();
    CHECK(store.getData<std::size_t>() == 599);
    CHECK_THROWS_AS(store.getData<std::int32_t>(), Error); // next slot holds a double
}

TEST_CASE("tapes nest through the thread-local current pointer") {
    CHECK(currentTape() == nullptr);
    {
        auto outer = makeTape(TapeKind::jacobianLinear);
        CHECK(currentTape() == outer.get());
        {
            auto inner = makeTape(TapeKind::primalValueReuse);
            CHECK(currentTape() == inner.get());
        }
        CHECK(currentTape() == outer.get());
    }
    CHECK(currentTape() == nullptr);
}

TEST_CASE("tape kind names parse back to their kinds") {
    for (const TapeKind kind : allKinds) {
        CHECK(parseTapeKind(tapeKindName(kind)) == kind);
    }
    CHECK_THROWS_AS(parseTapeKind("hessian"), Error);
}
