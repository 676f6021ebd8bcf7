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

#include <cmath>
#include <cstddef>
#include <vector>

#include "retape/external_function.hpp"
#include "retape/statistics.hpp"
#include "retape/tape.hpp"
#include "retape/types.hpp"

namespace retape::burgers {

// Coupled 2-D Burgers' system on the unit square, discretized with backward
// differences for the convection terms, central differences for the
// diffusion term, and explicit Euler time stepping. Initial and boundary
// values come from the exact solution
//
//   u(x, y, t) = (x + y - 2 x t) / (1 - 2 t^2)
//   v(x, y, t) = (x - y - 2 y t) / (1 - 2 t^2)
//
// which is affine in space, so the diffusion term vanishes on exact data and
// the backward convection stencil is spatially exact.

struct BurgersConfig {
    std::size_t nx = 0; // interior nodes per row
    std::size_t ny = 0; // interior nodes per column
    std::size_t steps = 0;
    double reynolds = 50.0;
    double dt = 0.0;

    double dx() const { return 1.0 / double(nx + 1); }
    double dTbyDX() const { return dt / dx(); }
    double dTbyDX2() const { return dt / (dx() * dx()); }
    double oneOverR() const { return 1.0 / reynolds; }

    std::size_t rowLength() const { return nx + 2; }
    std::size_t nodeCount() const { return (nx + 2) * (ny + 2); }
    std::size_t interiorCount() const { return nx * ny; }

    // Square grid with `grid` interior nodes per direction, dt = 0.1 dx:
    // keeps the advective step number around 0.1 |velocity| so the
    // sign-independent backward stencil stays stable.
    static BurgersConfig make(std::size_t grid, std::size_t steps);

    // Throws Error on an unusable configuration. A single dt/dx ratio is
    // used for both directions, so the grid must be square, and the total
    // time must stay clear of the exact solution's pole at t = 1/sqrt(2).
    void validate() const;
};

template <typename T>
struct FieldPair {
    std::vector<T> u;
    std::vector<T> v;
};

inline std::size_t getArrayPos(std::size_t xPos, std::size_t yPos, std::size_t rowLength) {
    return yPos * rowLength + xPos;
}

struct ExactPoint {
    double u;
    double v;
};

// Defined for every t: the pole at 1 - 2 t^2 == 0 falls between
// representable numbers, though values blow up around it.
ExactPoint exactSolution(double x, double y, double t);

// Every node (boundary ring and interior) set from the exact solution at
// t = 0.
FieldPair<double> initializeFields(const BurgersConfig& config);

// Same values as initializeFields with the interior nodes registered as
// inputs on the tape, u first then v, row-major. The registered identifiers
// come back in registration order for later gradient collection.
FieldPair<ActiveScalar> initializeActiveFields(const BurgersConfig& config, Tape& tape,
                                               std::vector<Identifier>& inputIds);

// Writes the exact solution at time t onto the boundary ring; interior nodes
// are untouched. Boundary values are plain doubles, so on active fields they
// are passive with respect to the recording.
template <typename T>
void applyBoundary(const BurgersConfig& config, FieldPair<T>& state, double t) {
    const std::size_t rowLength = config.rowLength();
    const double dx = config.dx();
    for (std::size_t xPos = 0; xPos < config.nx + 2; ++xPos) {
        const double x = double(xPos) * dx;
        const ExactPoint bottom = exactSolution(x, 0.0, t);
        const ExactPoint top = exactSolution(x, double(config.ny + 1) * dx, t);
        state.u[getArrayPos(xPos, 0, rowLength)] = bottom.u;
        state.v[getArrayPos(xPos, 0, rowLength)] = bottom.v;
        state.u[getArrayPos(xPos, config.ny + 1, rowLength)] = top.u;
        state.v[getArrayPos(xPos, config.ny + 1, rowLength)] = top.v;
    }
    for (std::size_t yPos = 1; yPos <= config.ny; ++yPos) {
        const double y = double(yPos) * dx;
        const ExactPoint left = exactSolution(0.0, y, t);
        const ExactPoint right = exactSolution(double(config.nx + 1) * dx, y, t);
        state.u[getArrayPos(0, yPos, rowLength)] = left.u;
        state.v[getArrayPos(0, yPos, rowLength)] = left.v;
        state.u[getArrayPos(config.nx + 1, yPos, rowLength)] = right.u;
        state.v[getArrayPos(config.nx + 1, yPos, rowLength)] = right.v;
    }
}

// One node of the explicit step for the transported field w (either u or v),
// advected by the velocity pair (u, v):
//
//   out[iOut] = w[i]
//             - dTbyDX * (u[i] * (w[i] - w[iXm]) + v[i] * (w[i] - w[iYm]))
//             + oneOverR * dTbyDX2
//                 * (w[iXp] - 2 w[i] + w[iXm] + w[iYp] - 2 w[i] + w[iYm])
//
// The template is shared by the passive, taped, and external-function
// paths, which is what makes their primal results bitwise identical.
template <typename T>
void updateElement(T* out, const T* w, const T* u, const T* v, std::size_t indexOut,
                   std::size_t index, std::size_t indexXp, std::size_t indexXm,
                   std::size_t indexYp, std::size_t indexYm, double dTbyDX, double dTbyDX2,
                   double oneOverR) {
    out[indexOut] = w[index] -
                    dTbyDX * (u[index] * (w[index] - w[indexXm]) +
                              v[index] * (w[index] - w[indexYm])) +
                    oneOverR * dTbyDX2 *
                        (w[indexXp] - 2.0 * w[index] + w[indexXm] + w[indexYp] -
                         2.0 * w[index] + w[indexYm]);
}

// Jacobi-style sweep over all interior nodes into fresh arrays. The boundary
// ring of the result is left default-initialized; the caller applies the
// next time level's boundary. With T = ActiveScalar and recording active,
// every arithmetic operation lands on the tape.
template <typename T>
FieldPair<T> updateField(const BurgersConfig& config, const FieldPair<T>& state) {
    const std::size_t rowLength = config.rowLength();
    FieldPair<T> next;
    next.u.resize(state.u.size());
    next.v.resize(state.v.size());
    const double dTbyDX = config.dTbyDX();
    const double dTbyDX2 = config.dTbyDX2();
    const double oneOverR = config.oneOverR();
    for (std::size_t yPos = 0; yPos < config.ny; ++yPos) {
        for (std::size_t xPos = 0; xPos < config.nx; ++xPos) {
            const std::size_t index = getArrayPos(xPos + 1, yPos + 1, rowLength);
            const std::size_t indexXp = index + 1;
            const std::size_t indexXm = index - 1;
            const std::size_t indexYp = index + rowLength;
            const std::size_t indexYm = index - rowLength;
            updateElement(next.u.data(), state.u.data(), state.u.data(), state.v.data(), index,
                          index, indexXp, indexXm, indexYp, indexYm, dTbyDX, dTbyDX2, oneOverR);
            updateElement(next.v.data(), state.v.data(), state.u.data(), state.v.data(), index,
                          index, indexXp, indexXm, indexYp, indexYm, dTbyDX, dTbyDX2, oneOverR);
        }
    }
    return next;
}

inline FieldPair<ActiveScalar> updateFieldTaped(const BurgersConfig& config,
                                                const FieldPair<ActiveScalar>& state) {
    return updateField(config, state);
}

// The same interior update on flat passive arrays, in the layout used by the
// external-function entry: x packs u then v including the halo ring, y packs
// interior u then interior v. The user data holds, in order, xSize, ySize
// (both size_t), dTbyDX, dTbyDX2, oneOverR.
void updateFieldExtFunc(const double* x, std::size_t m, double* y, std::size_t n,
                        UserDataStore* d);
void updateFieldExtFuncForward(const double* x, const double* xDot, std::size_t m, double* y,
                               double* yDot, std::size_t n, UserDataStore* d);
void updateFieldExtFuncReverse(const double* x, double* xBar, std::size_t m, const double* y,
                               const double* yBar, std::size_t n, UserDataStore* d);

// updateFieldExtFunc with its hand-derived tangent and adjoint.
DerivativeTriple updateFieldTriple();

// One whole time step as a single external-function entry: all halo-inclusive
// u then v nodes become entry inputs, all interior next-step u then v nodes
// become entry outputs, and the step constants travel as user data. Adds no
// statements to the tape.
FieldPair<ActiveScalar> updateFieldWithGeneratedDerivative(const BurgersConfig& config,
                                                           const FieldPair<ActiveScalar>& state);

// Euclidean norm over the interior nodes of both fields.
template <typename T>
T solutionNorm(const BurgersConfig& config, const FieldPair<T>& state) {
    const std::size_t rowLength = config.rowLength();
    T sum = 0.0;
    for (std::size_t yPos = 1; yPos <= config.ny; ++yPos) {
        for (std::size_t xPos = 1; xPos <= config.nx; ++xPos) {
            const std::size_t index = getArrayPos(xPos, yPos, rowLength);
            sum += state.u[index] * state.u[index];
            sum += state.v[index] * state.v[index];
        }
    }
    using std::sqrt;
    return sqrt(sum);
}

enum class SimulationMode { taped, external };

struct SimulationResult {
    double norm = 0.0;
    // d norm / d initial interior values, interior u row-major then interior
    // v row-major (registration order).
    std::vector<double> gradients;
    TapeStatistics statistics;
    double recordSeconds = 0.0;
    double reverseSeconds = 0.0;
};

// Full differentiated run on the given tape: initialize, register inputs,
// `steps` update sweeps with passively refreshed boundaries, norm, seed 1.0,
// reverse sweep, gradient collection. recordSeconds covers the recording
// (registration through norm), reverseSeconds the reverse sweep; field
// initialization is excluded from both.
SimulationResult runSimulation(const BurgersConfig& config, SimulationMode mode, Tape& tape);

// Convenience overload owning a fresh tape of the given kind.
SimulationResult runSimulation(const BurgersConfig& config, SimulationMode mode, TapeKind kind,
                               bool primalValueHandling = false);

// Passive run for finite-difference oracles: the interior initial values are
// supplied explicitly (u then v, row-major over the interior), boundaries
// follow the exact solution as usual. Returns the final norm.
double primalNorm(const BurgersConfig& config, const std::vector<double>& interiorU,
                  const std::vector<double>& interiorV);

} // namespace retape::burgers
