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
#include <cstdint>

namespace retape {

// One opcode per supported operation shape. Ops ending in Const take one
// active argument and one passive constant; constSub/constDiv/constMax are
// the mirrored forms where the constant is the left operand. Only opcodes
// whose partials depend on the constant store it on the tape.
//
// input    identifier reservation pushed by linear tapes for registered
//          inputs and external-function outputs; skipped by reverse sweeps.
// linComb  n-ary statement with caller-supplied partials, stored as passive
//          constants (the public recordStatement form).
enum class Opcode : std::uint16_t {
    input,
    copy,
    linComb,
    add,
    sub,
    mul,
    div,
    max,
    neg,
    sin,
    cos,
    exp,
    sqrt,
    abs,
    addConst,
    subConst,
    constSub,
    mulConst,
    divConst,
    constDiv,
    powConst,
    maxConst,
    constMax,
};

// Number of stored passive constants for a fixed-shape opcode. linComb is
// variable (one constant per argument) and handled by the caller.
constexpr std::uint32_t storedConstants(Opcode op) {
    switch (op) {
        case Opcode::mulConst:
        case Opcode::divConst:
        case Opcode::constDiv:
        case Opcode::powConst:
        case Opcode::maxConst:
        case Opcode::constMax:
            return 1;
        default:
            return 0;
    }
}

// Partials of the result with respect to the active arguments, evaluated at
// the argument primals p1/p2 and stored constant c. Jacobian tapes call this
// while recording and primal value tapes call it during the reverse sweep,
// so both kinds scatter bitwise identical values.
inline void computePartials(Opcode op, double p1, double p2, double c, double* out) {
    switch (op) {
        case Opcode::copy:
            out[0] = 1.0;
            break;
        case Opcode::add:
            out[0] = 1.0;
            out[1] = 1.0;
            break;
        case Opcode::sub:
            out[0] = 1.0;
            out[1] = -1.0;
            break;
        case Opcode::mul:
            out[0] = p2;
            out[1] = p1;
            break;
        case Opcode::div:
            out[0] = 1.0 / p2;
            out[1] = -p1 / (p2 * p2);
            break;
        case Opcode::max:
            // Ties keep the left operand, matching the primal computation.
            out[0] = p1 >= p2 ? 1.0 : 0.0;
            out[1] = p1 >= p2 ? 0.0 : 1.0;
            break;
        case Opcode::neg:
            out[0] = -1.0;
            break;
        case Opcode::sin:
            out[0] = std::cos(p1);
            break;
        case Opcode::cos:
            out[0] = -std::sin(p1);
            break;
        case Opcode::exp:
            out[0] = std::exp(p1);
            break;
        case Opcode::sqrt:
            out[0] = 0.5 / std::sqrt(p1);
            break;
        case Opcode::abs:
            out[0] = p1 < 0.0 ? -1.0 : 1.0;
            break;
        case Opcode::addConst:
        case Opcode::subConst:
            out[0] = 1.0;
            break;
        case Opcode::constSub:
            out[0] = -1.0;
            break;
        case Opcode::mulConst:
            out[0] = c;
            break;
        case Opcode::divConst:
            out[0] = 1.0 / c;
            break;
        case Opcode::constDiv:
            out[0] = -c / (p1 * p1);
            break;
        case Opcode::powConst:
            out[0] = c * std::pow(p1, c - 1.0);
            break;
        case Opcode::maxConst:
            out[0] = p1 >= c ? 1.0 : 0.0;
            break;
        case Opcode::constMax:
            out[0] = c >= p1 ? 0.0 : 1.0;
            break;
        case Opcode::input:
        case Opcode::linComb:
            break;
    }
}

} // namespace retape
