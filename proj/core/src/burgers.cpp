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

#include "retape/burgers.hpp"

#include <chrono>
#include <memory>
#include <utility>

namespace retape::burgers {

BurgersConfig BurgersConfig::make(std::size_t grid, std::size_t steps) {
    BurgersConfig config;
    config.nx = grid;
    config.ny = grid;
    config.steps = steps;
    config.dt = 0.1 * config.dx();
    return config;
}

void BurgersConfig::validate() const {
    if (nx == 0 || ny == 0) {
        throw Error("BurgersConfig: grid must have interior nodes");
    }
    if (nx != ny) {
        throw Error("BurgersConfig: grid must be square, one dt/dx ratio serves both directions");
    }
    if (!(dt > 0.0)) {
        throw Error("BurgersConfig: dt must be positive");
    }
    if (!(reynolds > 0.0)) {
        throw Error("BurgersConfig: Reynolds number must be positive");
    }
    if (dt * double(steps) >= 1.0 / std::sqrt(2.0)) {
        throw Error("BurgersConfig: simulated time reaches the exact solution's pole");
    }
}

ExactPoint exactSolution(double x, double y, double t) {
    // The squares of the two doubles closest to sqrt(0.5) straddle 0.5, so
    // the denominator never rounds to zero and the division is always
    // defined. validate() keeps simulations clear of the pole's blow-up.
    const double denominator = 1.0 - 2.0 * t * t;
    return {(x + y - 2.0 * x * t) / denominator, (x - y - 2.0 * y * t) / denominator};
}

FieldPair<double> initializeFields(const BurgersConfig& config) {
    FieldPair<double> state;
    state.u.resize(config.nodeCount());
    state.v.resize(config.nodeCount());
    const std::size_t rowLength = config.rowLength();
    const double dx = config.dx();
    for (std::size_t yPos = 0; yPos < config.ny + 2; ++yPos) {
        for (std::size_t xPos = 0; xPos < config.nx + 2; ++xPos) {
            const ExactPoint point = exactSolution(double(xPos) * dx, double(yPos) * dx, 0.0);
            state.u[getArrayPos(xPos, yPos, rowLength)] = point.u;
            state.v[getArrayPos(xPos, yPos, rowLength)] = point.v;
        }
    }
    return state;
}

namespace {

// Copies the initial values onto active fields and registers the interior
// nodes, u first then v, row-major; boundary nodes stay passive.
FieldPair<ActiveScalar> registerInitialState(const FieldPair<double>& initial,
                                             const BurgersConfig& config, Tape& tape,
                                             std::vector<Identifier>& inputIds) {
    FieldPair<ActiveScalar> state;
    state.u.assign(initial.u.begin(), initial.u.end());
    state.v.assign(initial.v.begin(), initial.v.end());
    inputIds.clear();
    inputIds.reserve(2 * config.interiorCount());
    const std::size_t rowLength = config.rowLength();
    for (std::vector<ActiveScalar>* field : {&state.u, &state.v}) {
        for (std::size_t yPos = 1; yPos <= config.ny; ++yPos) {
            for (std::size_t xPos = 1; xPos <= config.nx; ++xPos) {
                ActiveScalar& value = (*field)[getArrayPos(xPos, yPos, rowLength)];
                tape.registerInput(value);
                inputIds.push_back(value.identifier());
            }
        }
    }
    return state;
}

struct StepConstants {
    std::size_t xSize = 0; // interior nodes per row
    std::size_t ySize = 0;
    double dTbyDX = 0.0;
    double dTbyDX2 = 0.0;
    double oneOverR = 0.0;

    std::size_t inputGridSize() const { return (xSize + 2) * (ySize + 2); }
    std::size_t outputGridSize() const { return xSize * ySize; }
};

StepConstants readStepConstants(UserDataStore* d) {
    StepConstants c;
    c.xSize = d->getData<std::size_t>();
    c.ySize = d->getData<std::size_t>();
    c.dTbyDX = d->getData<double>();
    c.dTbyDX2 = d->getData<double>();
    c.oneOverR = d->getData<double>();
    return c;
}

// Derivatives of one updateElement output with respect to its seven inputs:
// the transported field w at the five stencil nodes and the two advecting
// velocities at the center. When w aliases u or v the caller accumulates the
// coinciding terms.
struct ElementPartials {
    double wCenter;
    double wXp;
    double wXm;
    double wYp;
    double wYm;
    double uCenter;
    double vCenter;
};

ElementPartials elementPartials(const double* w, const double* u, const double* v,
                                std::size_t index, std::size_t indexXm, std::size_t indexYm,
                                double dTbyDX, double dTbyDX2, double oneOverR) {
    const double kappa = oneOverR * dTbyDX2;
    ElementPartials p;
    p.wCenter = 1.0 - dTbyDX * (u[index] + v[index]) - 4.0 * kappa;
    p.wXp = kappa;
    p.wXm = dTbyDX * u[index] + kappa;
    p.wYp = kappa;
    p.wYm = dTbyDX * v[index] + kappa;
    p.uCenter = -dTbyDX * (w[index] - w[indexXm]);
    p.vCenter = -dTbyDX * (w[index] - w[indexYm]);
    return p;
}

} // namespace

void updateFieldExtFunc(const double* x, std::size_t m, double* y, std::size_t n,
                        UserDataStore* d) {
    const StepConstants c = readStepConstants(d);
    (void)m;
    (void)n;
    const double* u = x;
    const double* v = x + c.inputGridSize();
    double* uNext = y;
    double* vNext = y + c.outputGridSize();
    for (std::size_t yPos = 0; yPos < c.ySize; ++yPos) {
        for (std::size_t xPos = 0; xPos < c.xSize; ++xPos) {
            const std::size_t indexOut = getArrayPos(xPos, yPos, c.xSize);
            const std::size_t index = getArrayPos(xPos + 1, yPos + 1, c.xSize + 2);
            const std::size_t indexXp = index + 1;
            const std::size_t indexXm = index - 1;
            const std::size_t indexYp = index + c.xSize + 2;
            const std::size_t indexYm = index - (c.xSize + 2);
            updateElement(uNext, u, u, v, indexOut, index, indexXp, indexXm, indexYp, indexYm,
                          c.dTbyDX, c.dTbyDX2, c.oneOverR);
            updateElement(vNext, v, u, v, indexOut, index, indexXp, indexXm, indexYp, indexYm,
                          c.dTbyDX, c.dTbyDX2, c.oneOverR);
        }
    }
}

void updateFieldExtFuncForward(const double* x, const double* xDot, std::size_t m, double* y,
                               double* yDot, std::size_t n, UserDataStore* d) {
    const StepConstants c = readStepConstants(d);
    (void)m;
    (void)n;
    const double* u = x;
    const double* v = x + c.inputGridSize();
    const double* uDot = xDot;
    const double* vDot = xDot + c.inputGridSize();
    double* uNext = y;
    double* vNext = y + c.outputGridSize();
    double* uNextDot = yDot;
    double* vNextDot = yDot + c.outputGridSize();
    for (std::size_t yPos = 0; yPos < c.ySize; ++yPos) {
        for (std::size_t xPos = 0; xPos < c.xSize; ++xPos) {
            const std::size_t indexOut = getArrayPos(xPos, yPos, c.xSize);
            const std::size_t index = getArrayPos(xPos + 1, yPos + 1, c.xSize + 2);
            const std::size_t indexXp = index + 1;
            const std::size_t indexXm = index - 1;
            const std::size_t indexYp = index + c.xSize + 2;
            const std::size_t indexYm = index - (c.xSize + 2);
            updateElement(uNext, u, u, v, indexOut, index, indexXp, indexXm, indexYp, indexYm,
                          c.dTbyDX, c.dTbyDX2, c.oneOverR);
            updateElement(vNext, v, u, v, indexOut, index, indexXp, indexXm, indexYp, indexYm,
                          c.dTbyDX, c.dTbyDX2, c.oneOverR);

            const ElementPartials pu = elementPartials(u, u, v, index, indexXm, indexYm,
                                                       c.dTbyDX, c.dTbyDX2, c.oneOverR);
            uNextDot[indexOut] = pu.wCenter * uDot[index] + pu.wXp * uDot[indexXp] +
                                 pu.wXm * uDot[indexXm] + pu.wYp * uDot[indexYp] +
                                 pu.wYm * uDot[indexYm] + pu.uCenter * uDot[index] +
                                 pu.vCenter * vDot[index];

            const ElementPartials pv = elementPartials(v, u, v, index, indexXm, indexYm,
                                                       c.dTbyDX, c.dTbyDX2, c.oneOverR);
            vNextDot[indexOut] = pv.wCenter * vDot[index] + pv.wXp * vDot[indexXp] +
                                 pv.wXm * vDot[indexXm] + pv.wYp * vDot[indexYp] +
                                 pv.wYm * vDot[indexYm] + pv.uCenter * uDot[index] +
                                 pv.vCenter * vDot[index];
        }
    }
}

void updateFieldExtFuncReverse(const double* x, double* xBar, std::size_t m, const double*,
                               const double* yBar, std::size_t n, UserDataStore* d) {
    const StepConstants c = readStepConstants(d);
    (void)m;
    (void)n;
    const double* u = x;
    const double* v = x + c.inputGridSize();
    double* uBar = xBar;
    double* vBar = xBar + c.inputGridSize();
    const double* uNextBar = yBar;
    const double* vNextBar = yBar + c.outputGridSize();
    for (std::size_t yPos = 0; yPos < c.ySize; ++yPos) {
        for (std::size_t xPos = 0; xPos < c.xSize; ++xPos) {
            const std::size_t indexOut = getArrayPos(xPos, yPos, c.xSize);
            const std::size_t index = getArrayPos(xPos + 1, yPos + 1, c.xSize + 2);
            const std::size_t indexXp = index + 1;
            const std::size_t indexXm = index - 1;
            const std::size_t indexYp = index + c.xSize + 2;
            const std::size_t indexYm = index - (c.xSize + 2);

            const double au = uNextBar[indexOut];
            const ElementPartials pu = elementPartials(u, u, v, index, indexXm, indexYm,
                                                       c.dTbyDX, c.dTbyDX2, c.oneOverR);
            uBar[index] += (pu.wCenter + pu.uCenter) * au;
            uBar[indexXp] += pu.wXp * au;
            uBar[indexXm] += pu.wXm * au;
            uBar[indexYp] += pu.wYp * au;
            uBar[indexYm] += pu.wYm * au;
            vBar[index] += pu.vCenter * au;

            const double av = vNextBar[indexOut];
            const ElementPartials pv = elementPartials(v, u, v, index, indexXm, indexYm,
                                                       c.dTbyDX, c.dTbyDX2, c.oneOverR);
            vBar[index] += (pv.wCenter + pv.vCenter) * av;
            vBar[indexXp] += pv.wXp * av;
            vBar[indexXm] += pv.wXm * av;
            vBar[indexYp] += pv.wYp * av;
            vBar[indexYm] += pv.wYm * av;
            uBar[index] += pv.uCenter * av;
        }
    }
}

DerivativeTriple updateFieldTriple() {
    return {updateFieldExtFunc, updateFieldExtFuncForward, updateFieldExtFuncReverse};
}

FieldPair<ActiveScalar> initializeActiveFields(const BurgersConfig& config, Tape& tape,
                                               std::vector<Identifier>& inputIds) {
    return registerInitialState(initializeFields(config), config, tape, inputIds);
}

FieldPair<ActiveScalar> updateFieldWithGeneratedDerivative(const BurgersConfig& config,
                                                           const FieldPair<ActiveScalar>& state) {
    const std::size_t rowLength = config.rowLength();
    FieldPair<ActiveScalar> next;
    next.u.resize(state.u.size());
    next.v.resize(state.v.size());

    ExternalFunctionHelper helper;
    for (const ActiveScalar& value : state.u) {
        helper.addInput(value);
    }
    for (const ActiveScalar& value : state.v) {
        helper.addInput(value);
    }
    for (std::vector<ActiveScalar>* field : {&next.u, &next.v}) {
        for (std::size_t yPos = 1; yPos <= config.ny; ++yPos) {
            for (std::size_t xPos = 1; xPos <= config.nx; ++xPos) {
                helper.addOutput((*field)[getArrayPos(xPos, yPos, rowLength)]);
            }
        }
    }

    UserDataStore& userData = helper.userData();
    userData.addData(config.nx);
    userData.addData(config.ny);
    userData.addData(config.dTbyDX());
    userData.addData(config.dTbyDX2());
    userData.addData(config.oneOverR());

    helper.addToTape(updateFieldTriple());
    return next;
}

namespace {

double secondsBetween(std::chrono::steady_clock::time_point start,
                      std::chrono::steady_clock::time_point end) {
    return std::chrono::duration<double>(end - start).count();
}

} // namespace

SimulationResult runSimulation(const BurgersConfig& config, SimulationMode mode, Tape& tape) {
    config.validate();
    if (currentTape() != &tape) {
        // All overloaded operations and helpers reach the thread's current
        // tape; recording onto any other tape would silently misroute them.
        throw Error("runSimulation: the tape must be this thread's current tape");
    }

    const FieldPair<double> initial = initializeFields(config);

    SimulationResult result;
    tape.setRecording(true);

    const auto recordStart = std::chrono::steady_clock::now();
    std::vector<Identifier> inputIds;
    FieldPair<ActiveScalar> state = registerInitialState(initial, config, tape, inputIds);

    for (std::size_t step = 0; step < config.steps; ++step) {
        FieldPair<ActiveScalar> next = mode == SimulationMode::taped
                                           ? updateField(config, state)
                                           : updateFieldWithGeneratedDerivative(config, state);
        applyBoundary(config, next, double(step + 1) * config.dt);
        state = std::move(next);
    }

    ActiveScalar norm = solutionNorm(config, state);
    tape.registerOutput(norm);
    const auto recordEnd = std::chrono::steady_clock::now();

    tape.setRecording(false);
    result.norm = norm.value();
    tape.setGradient(norm, 1.0);

    const auto reverseStart = std::chrono::steady_clock::now();
    tape.evaluate();
    const auto reverseEnd = std::chrono::steady_clock::now();

    result.gradients.reserve(inputIds.size());
    for (const Identifier id : inputIds) {
        result.gradients.push_back(tape.getGradient(id));
    }
    result.statistics = tape.statistics();
    result.recordSeconds = secondsBetween(recordStart, recordEnd);
    result.reverseSeconds = secondsBetween(reverseStart, reverseEnd);
    return result;
}

SimulationResult runSimulation(const BurgersConfig& config, SimulationMode mode, TapeKind kind,
                               bool primalValueHandling) {
    std::unique_ptr<Tape> tape = makeTape(kind);
    if (primalValueHandling) {
        if (!isPrimalValueKind(kind)) {
            throw Error("runSimulation: primal value handling requires a primal value tape");
        }
        tape->setPrimalValueHandling(true);
    }
    return runSimulation(config, mode, *tape);
}

double primalNorm(const BurgersConfig& config, const std::vector<double>& interiorU,
                  const std::vector<double>& interiorV) {
    config.validate();
    if (interiorU.size() != config.interiorCount() || interiorV.size() != config.interiorCount()) {
        throw Error("primalNorm: interior value counts do not match the grid");
    }

    FieldPair<double> state = initializeFields(config);
    const std::size_t rowLength = config.rowLength();
    std::size_t cursor = 0;
    for (std::size_t yPos = 1; yPos <= config.ny; ++yPos) {
        for (std::size_t xPos = 1; xPos <= config.nx; ++xPos, ++cursor) {
            state.u[getArrayPos(xPos, yPos, rowLength)] = interiorU[cursor];
        }
    }
    cursor = 0;
    for (std::size_t yPos = 1; yPos <= config.ny; ++yPos) {
        for (std::size_t xPos = 1; xPos <= config.nx; ++xPos, ++cursor) {
            state.v[getArrayPos(xPos, yPos, rowLength)] = interiorV[cursor];
        }
    }

    for (std::size_t step = 0; step < config.steps; ++step) {
        FieldPair<double> next = updateField(config, state);
        applyBoundary(config, next, double(step + 1) * config.dt);
        state = std::move(next);
    }
    return solutionNorm(config, state);
}

} // namespace retape::burgers
