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
#include <functional>
#include <utility>
#include <vector>

#include "retape/active_scalar.hpp"
#include "retape/types.hpp"
#include "retape/user_data.hpp"

namespace retape {

class Tape;

// Callback signatures for a function y = f(x) spliced into the tape as a
// single record. x has length m, y has length n. The reverse callback must
// accumulate into xBar (the framework zeroes the buffer beforehand); y may
// be null when output primals were neither stored nor recoverable.
using ExternalPrimalFunc =
    std::function<void(const double* x, std::size_t m, double* y, std::size_t n, UserDataStore* d)>;
using ExternalForwardFunc = std::function<void(const double* x, const double* xDot, std::size_t m,
                                               double* y, double* yDot, std::size_t n,
                                               UserDataStore* d)>;
using ExternalReverseFunc = std::function<void(const double* x, double* xBar, std::size_t m,
                                               const double* y, const double* yBar, std::size_t n,
                                               UserDataStore* d)>;

// A primal function together with its hand- or tool-written tangent and
// adjoint. The pair must satisfy the dot-product identity <yBar, yDot> ==
// <xBar, xDot>; verifyDerivativeTriple checks exactly that.
struct DerivativeTriple {
    ExternalPrimalFunc primal;
    ExternalForwardFunc forward;
    ExternalReverseFunc reverse;
};

// Accounted size in bytes of one external-function entry: a fixed overhead
// of 256 for positions and callbacks, one identifier per input and output,
// one stored primal per input, plus optionally one stored primal per output.
// Primal-value tapes with specialized handling recover the input primals
// from the primal value vector instead of storing them, which removes the
// m * 8 term. User data is accounted separately.
inline std::uint64_t externalFunctionMemory(std::uint64_t m, std::uint64_t n, TapeKind kind,
                                            bool storeOutputPrimals,
                                            bool primalValueHandling = false) {
    std::uint64_t bytes = externalFunctionOverheadBytes +
                          m * (bytesPerReal + bytesPerIdentifier) + n * bytesPerIdentifier;
    if (storeOutputPrimals) {
        bytes += n * bytesPerReal;
    }
    if (isPrimalValueKind(kind) && primalValueHandling) {
        bytes -= m * bytesPerReal;
    }
    return bytes;
}

// One committed external function on the tape. The reverse sweep gathers the
// output adjoints, reconstructs x, invokes the reverse callback and scatters
// the resulting input adjoints.
struct ExternalFunctionEntry {
    std::vector<Identifier> inputIds;
    std::vector<Identifier> outputIds;

    // Input primals as captured at commit time; empty when the tape gathers
    // them from its primal value vector during the sweep.
    std::vector<double> inputPrimals;

    // Gather mode cannot recover passive inputs (identifier 0) from the
    // primal value vector, so their positions and values are kept here. This
    // sidecar is outside the accounted byte formula.
    std::vector<std::pair<std::size_t, double>> passiveInputs;

    // With storeOutputPrimals: the computed outputs y. On primal-value reuse
    // tapes the buffer instead swaps with the primal vector slots during the
    // sweeps, holding whichever of {overwritten value, y} the vector does
    // not currently hold; after a full evaluate it again holds the
    // overwritten values and the vector holds y.
    std::vector<double> outputPrimals;

    UserDataStore userData;
    ExternalReverseFunc reverse;
    ExternalForwardFunc forward;

    // Tape position right after the entry was committed; the reverse sweep
    // replays the entry before it crosses this statement boundary.
    Position position;

    bool gatherInputsFromPrimalVector = false;
    bool hasOutputPrimals = false;

    std::uint64_t inputCount() const { return inputIds.size(); }
    std::uint64_t outputCount() const { return outputIds.size(); }

    // Matches externalFunctionMemory for the owning tape's configuration.
    std::uint64_t accountedBytes() const {
        std::uint64_t bytes = externalFunctionOverheadBytes +
                              (inputCount() + outputCount()) * bytesPerIdentifier;
        if (!gatherInputsFromPrimalVector) {
            bytes += inputCount() * bytesPerReal;
        }
        if (hasOutputPrimals) {
            bytes += outputCount() * bytesPerReal;
        }
        return bytes;
    }

    // The data portion of accountedBytes plus the user data payload; this is
    // what specialized handling shrinks.
    std::uint64_t dataBytes() const {
        std::uint64_t bytes = userData.byteSize();
        if (!gatherInputsFromPrimalVector) {
            bytes += inputCount() * bytesPerReal;
        }
        return bytes;
    }
};

// Builds an external-function entry incrementally: capture inputs, let the
// primal produce the outputs, attach user data, commit. Mirrors the usage
//
//   ExternalFunctionHelper helper;
//   helper.addInput(u[i]); ...
//   helper.addOutput(uNext[i]); ...
//   helper.userData().addData(xSize); ...
//   helper.addToTape(triple);
//
// Inputs must be added before addToTape runs the primal; the helper rejects
// later additions. The output scalars receive fresh identifiers and the
// computed primal values when the entry is committed.
class ExternalFunctionHelper {
public:
    ExternalFunctionHelper();
    explicit ExternalFunctionHelper(Tape& tape);

    void addInput(const ActiveScalar& value);
    void addOutput(ActiveScalar& value);
    UserDataStore& userData() { return userData_; }

    // Forces storage of the computed output primals with the entry (always
    // on for primal-value reuse tapes, which need them for rewinding).
    void setStoreOutputPrimals(bool enabled) { storeOutputPrimals_ = enabled; }

    void addToTape(const DerivativeTriple& triple);

private:
    Tape* tape_;
    std::vector<Identifier> inputIds_;
    std::vector<double> inputPrimals_;
    std::vector<ActiveScalar*> outputs_;
    UserDataStore userData_;
    bool storeOutputPrimals_ = false;
    bool committed_ = false;
};

// One-call form for derivative triples that operate on contiguous arrays:
//
//   GeneratedFunctionHelper helper;
//   helper.addToTape(triple, x, m, y, n);
//
// equivalent to adding every x as input and every y as output. x and y must
// not overlap.
class GeneratedFunctionHelper {
public:
    GeneratedFunctionHelper();
    explicit GeneratedFunctionHelper(Tape& tape);

    UserDataStore& userData() { return helper_.userData(); }
    void setStoreOutputPrimals(bool enabled) { helper_.setStoreOutputPrimals(enabled); }

    void addToTape(const DerivativeTriple& triple, const ActiveScalar* x, std::size_t m,
                   ActiveScalar* y, std::size_t n);

private:
    ExternalFunctionHelper helper_;
};

} // namespace retape
