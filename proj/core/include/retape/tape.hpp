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
#include <initializer_list>
#include <memory>
#include <utility>
#include <vector>

#include "retape/active_scalar.hpp"
#include "retape/external_function.hpp"
#include "retape/index_manager.hpp"
#include "retape/memory_tracker.hpp"
#include "retape/opcodes.hpp"
#include "retape/statistics.hpp"
#include "retape/types.hpp"

namespace retape {

class Tape;

namespace detail {
// The current tape of this thread. Tape construction pushes the new tape
// here and destruction restores the previous one, so scalars always reach
// the innermost live tape without any global setup.
Tape*& currentTapePointer();
} // namespace detail

inline Tape* currentTape() { return detail::currentTapePointer(); }

// Reverse-mode tape. Records one statement per overloaded operation while
// recording is active; evaluate() walks the records backwards and propagates
// adjoints per statement as
//
//   a := adjoint[lhs]; adjoint[lhs] := 0;
//   adjoint[arg_k] += partial_k * a
//
// The four concrete variants differ in how identifiers are managed (linear
// vs. reuse) and in whether partials are stored at recording time (Jacobian)
// or recomputed from the primal value vector during the sweep (primal
// value). A tape and its scalars are confined to the constructing thread.
class Tape {
public:
    explicit Tape(TapeKind kind);
    virtual ~Tape();

    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    TapeKind kind() const { return kind_; }

    // While recording is off, overloaded operations compute primal values
    // only and their results are passive.
    void setRecording(bool active) { recording_ = active; }
    bool isRecording() const { return recording_; }

    // Gives the value a fresh identifier and marks its adjoint slot as a
    // gradient that survives the sweep.
    void registerInput(ActiveScalar& value);

    // Pins the identifier so reuse management cannot recycle it before
    // reset. Registering a passive value is an error: it would mean
    // differentiating a constant.
    void registerOutput(ActiveScalar& value);

    // Appends a statement with caller-supplied partials. Passive arguments
    // are dropped; when none remain, lhs simply becomes passive. Primal
    // value tapes keep the partials as stored constants of a
    // linear-combination statement, so the caller's values are final either
    // way.
    void recordStatement(ActiveScalar& lhs, const std::pair<Identifier, double>* args,
                         std::size_t argCount, double primalResult);
    void recordStatement(ActiveScalar& lhs,
                         std::initializer_list<std::pair<Identifier, double>> args,
                         double primalResult);

    // Seeds accumulate so that several outputs sharing one identifier each
    // contribute their seed.
    void setGradient(Identifier id, double seed);
    double getGradient(Identifier id) const;
    void setGradient(const ActiveScalar& value, double seed) { setGradient(value.identifier(), seed); }
    double getGradient(const ActiveScalar& value) const { return getGradient(value.identifier()); }

    // Full reverse sweep over everything recorded so far: statements and
    // external-function entries replay in exact reverse order. Afterwards
    // the input gradients are readable and every other adjoint has been
    // consumed back to zero. On linear tapes the registered inputs' adjoint
    // slots are cleared first, so each call yields exactly its own seeds'
    // gradients and a call without fresh seeds yields zeros. Reuse tapes
    // skip that clearing and accumulate across calls: under copy
    // optimization an output can share a registered input's identifier, and
    // its seed must not be wiped. On primal value reuse tapes a restore
    // pass leaves the primal vector exactly as it was when recording
    // stopped, so evaluate() can run repeatedly.
    void evaluate();

    // Partial sweep between two recorded positions (from > to). No input
    // clearing and no restore pass happen here; on primal value reuse tapes
    // the primal vector is left rewound to `to`.
    void evaluateReverse(const Position& from, const Position& to);

    // Drops all recordings and adjoints and frees all identifiers. The
    // memory high watermark is kept.
    void reset();

    TapeStatistics statistics() const;
    virtual Position position() const = 0;

    // Reuse tapes share the right-hand side's identifier on copy assignment
    // instead of recording a copy statement. On by default.
    void setCopyOptimization(bool enabled) { copyOptimization_ = enabled; }
    bool copyOptimization() const { return copyOptimization_; }

    // Primal value tapes with specialized handling gather external-function
    // inputs from the primal value vector during the sweep instead of
    // storing a copy with the entry.
    void setPrimalValueHandling(bool enabled) { primalValueHandling_ = enabled; }
    bool primalValueHandling() const { return primalValueHandling_; }

    const std::vector<ExternalFunctionEntry>& externalFunctionEntries() const { return entries_; }

    // ---- recording interface used by the operator overloads and helpers

    ActiveScalar recordUnary(Opcode op, double result, Identifier arg, double partial,
                             double constant = 0.0);
    ActiveScalar recordBinary(Opcode op, double result, Identifier argA, Identifier argB,
                              double partialA, double partialB);

    // Copy semantics: share the identifier under reuse management with the
    // copy optimization enabled, otherwise record a one-argument statement
    // with partial 1. Returns the identifier for the destination.
    Identifier recordCopy(double value, Identifier srcId);

    void releaseIdentifier(Identifier id);

    // Runs triple.primal on the captured inputs, gives each output scalar a
    // fresh identifier carrying the computed primal, and appends the entry
    // at the current position. Called by the helpers.
    void commitExternalFunction(const DerivativeTriple& triple,
                                std::vector<Identifier>&& inputIds,
                                std::vector<double>&& inputPrimals,
                                const std::vector<ActiveScalar*>& outputs,
                                UserDataStore&& userData, bool storeOutputPrimals);

protected:
    // Appends one statement, acquiring and returning the lhs identifier.
    // Jacobian tapes store the partials; primal value tapes store the opcode
    // plus, for linComb, the partials as constants, or the single operand
    // constant for the const-variant opcodes.
    virtual Identifier appendStatement(Opcode op, double result, const Identifier* argIds,
                                       const double* partials, std::uint32_t argCount,
                                       double constant) = 0;

    // Identifier reservation for registered inputs. Every tape pushes a
    // zero-argument record: linear tapes need it to keep identifiers aligned
    // with statement ordinals, and on reuse tapes it keeps statement counts
    // comparable. Primal value tapes also write the primal vector slot (the
    // reuse variant records the overwritten slot content for rewinding).
    virtual Identifier reserveIdentifier(double value) = 0;

    // Identifier acquisition for external-function outputs. No record is
    // pushed; linear sweeps account for the identifier gap via the entry's
    // output count. Primal value tapes write the vector slot and report the
    // overwritten content so the entry can rewind it.
    virtual Identifier acquireExternalOutput(double value, double& overwritten) = 0;

    virtual void evaluateReverseImpl(const Position& from, const Position& to) = 0;

    // Re-applies recordings forward so the primal vector matches the
    // recording-stop state again; only the primal value reuse tape does
    // anything here.
    virtual void restorePrimalValues(const Position& from, const Position& to);

    virtual void resetStorage() = 0;
    virtual void fillStorageStatistics(TapeStatistics& stats) const = 0;

    // Primal value tapes expose their vector for external-function replay.
    virtual double* primalVectorData() { return nullptr; }

    void ensureAdjointSize() { adjoints_.ensureSize(std::size_t(indexManager_.largestAssigned()) + 1); }

    // Reverse replay of one external-function entry; shared by the concrete
    // sweep loops.
    void replayExternalFunction(ExternalFunctionEntry& entry);

    std::uint64_t trackedEntryBytes(const ExternalFunctionEntry& entry) const;

    TapeKind kind_;
    bool recording_ = false;
    bool copyOptimization_ = true;
    bool primalValueHandling_ = false;
    MemoryTracker tracker_;
    IndexManager indexManager_;
    TrackedDoubleVector adjoints_;
    std::vector<ExternalFunctionEntry> entries_;
    std::vector<Identifier> inputIds_; // cleared by linear evaluate()

private:
    Tape* previousTape_ = nullptr;
};

std::unique_ptr<Tape> makeTape(TapeKind kind);

// ---- ActiveScalar members that need the tape interface ----

inline ActiveScalar::ActiveScalar(const ActiveScalar& other) : value_(other.value_) {
    Tape* tape = currentTape();
    id_ = tape != nullptr ? tape->recordCopy(value_, other.id_) : passiveId;
}

inline ActiveScalar::ActiveScalar(ActiveScalar&& other) noexcept
    : value_(other.value_), id_(other.id_) {
    other.id_ = passiveId;
}

inline ActiveScalar::~ActiveScalar() {
    if (id_ != passiveId) {
        Tape* tape = currentTape();
        if (tape != nullptr) {
            tape->releaseIdentifier(id_);
        }
    }
}

inline ActiveScalar& ActiveScalar::operator=(double value) {
    const Identifier old = id_;
    id_ = passiveId;
    value_ = value;
    if (old != passiveId) {
        Tape* tape = currentTape();
        if (tape != nullptr) {
            tape->releaseIdentifier(old);
        }
    }
    return *this;
}

inline ActiveScalar& ActiveScalar::operator=(const ActiveScalar& other) {
    if (this != &other) {
        Tape* tape = currentTape();
        // Acquire before releasing: the new identifier must never collide
        // with the one we still hold.
        const Identifier acquired =
            tape != nullptr ? tape->recordCopy(other.value_, other.id_) : passiveId;
        const Identifier old = id_;
        id_ = acquired;
        value_ = other.value_;
        if (old != passiveId && tape != nullptr) {
            tape->releaseIdentifier(old);
        }
    }
    return *this;
}

inline ActiveScalar& ActiveScalar::operator=(ActiveScalar&& other) noexcept {
    if (this != &other) {
        const Identifier old = id_;
        id_ = other.id_;
        value_ = other.value_;
        other.id_ = passiveId;
        if (old != passiveId) {
            Tape* tape = currentTape();
            if (tape != nullptr) {
                tape->releaseIdentifier(old);
            }
        }
    }
    return *this;
}

inline void ActiveScalar::setGradient(double seed) {
    Tape* tape = currentTape();
    if (tape == nullptr) {
        throw Error("setGradient: no current tape");
    }
    tape->setGradient(id_, seed);
}

inline double ActiveScalar::gradient() const {
    Tape* tape = currentTape();
    return tape != nullptr ? tape->getGradient(id_) : 0.0;
}

// ---- operator overloads ----

inline ActiveScalar operator+(const ActiveScalar& a, const ActiveScalar& b) {
    const double result = a.value() + b.value();
    Tape* tape = currentTape();
    if (tape != nullptr) {
        const bool activeA = a.identifier() != passiveId;
        const bool activeB = b.identifier() != passiveId;
        if (activeA && activeB) {
            return tape->recordBinary(Opcode::add, result, a.identifier(), b.identifier(), 1.0,
                                      1.0);
        }
        if (activeA) {
            return tape->recordUnary(Opcode::addConst, result, a.identifier(), 1.0);
        }
        if (activeB) {
            return tape->recordUnary(Opcode::addConst, result, b.identifier(), 1.0);
        }
    }
    return result;
}

inline ActiveScalar operator-(const ActiveScalar& a, const ActiveScalar& b) {
    const double result = a.value() - b.value();
    Tape* tape = currentTape();
    if (tape != nullptr) {
        const bool activeA = a.identifier() != passiveId;
        const bool activeB = b.identifier() != passiveId;
        if (activeA && activeB) {
            return tape->recordBinary(Opcode::sub, result, a.identifier(), b.identifier(), 1.0,
                                      -1.0);
        }
        if (activeA) {
            return tape->recordUnary(Opcode::subConst, result, a.identifier(), 1.0);
        }
        if (activeB) {
            return tape->recordUnary(Opcode::constSub, result, b.identifier(), -1.0);
        }
    }
    return result;
}

inline ActiveScalar operator*(const ActiveScalar& a, const ActiveScalar& b) {
    const double result = a.value() * b.value();
    Tape* tape = currentTape();
    if (tape != nullptr) {
        const bool activeA = a.identifier() != passiveId;
        const bool activeB = b.identifier() != passiveId;
        if (activeA && activeB) {
            return tape->recordBinary(Opcode::mul, result, a.identifier(), b.identifier(),
                                      b.value(), a.value());
        }
        if (activeA) {
            return tape->recordUnary(Opcode::mulConst, result, a.identifier(), b.value(),
                                     b.value());
        }
        if (activeB) {
            return tape->recordUnary(Opcode::mulConst, result, b.identifier(), a.value(),
                                     a.value());
        }
    }
    return result;
}

inline ActiveScalar operator/(const ActiveScalar& a, const ActiveScalar& b) {
    const double result = a.value() / b.value();
    Tape* tape = currentTape();
    if (tape != nullptr) {
        const bool activeA = a.identifier() != passiveId;
        const bool activeB = b.identifier() != passiveId;
        if (activeA && activeB) {
            return tape->recordBinary(Opcode::div, result, a.identifier(), b.identifier(),
                                      1.0 / b.value(), -result / b.value());
        }
        if (activeA) {
            return tape->recordUnary(Opcode::divConst, result, a.identifier(), 1.0 / b.value(),
                                     b.value());
        }
        if (activeB) {
            return tape->recordUnary(Opcode::constDiv, result, b.identifier(),
                                     -a.value() / (b.value() * b.value()), a.value());
        }
    }
    return result;
}

inline ActiveScalar operator-(const ActiveScalar& a) {
    const double result = -a.value();
    Tape* tape = currentTape();
    if (tape != nullptr && a.identifier() != passiveId) {
        return tape->recordUnary(Opcode::neg, result, a.identifier(), -1.0);
    }
    return result;
}

inline ActiveScalar operator+(const ActiveScalar& a) { return a; }

inline ActiveScalar sin(const ActiveScalar& a) {
    const double result = std::sin(a.value());
    Tape* tape = currentTape();
    if (tape != nullptr && a.identifier() != passiveId) {
        return tape->recordUnary(Opcode::sin, result, a.identifier(), std::cos(a.value()));
    }
    return result;
}

inline ActiveScalar cos(const ActiveScalar& a) {
    const double result = std::cos(a.value());
    Tape* tape = currentTape();
    if (tape != nullptr && a.identifier() != passiveId) {
        return tape->recordUnary(Opcode::cos, result, a.identifier(), -std::sin(a.value()));
    }
    return result;
}

inline ActiveScalar exp(const ActiveScalar& a) {
    const double result = std::exp(a.value());
    Tape* tape = currentTape();
    if (tape != nullptr && a.identifier() != passiveId) {
        return tape->recordUnary(Opcode::exp, result, a.identifier(), result);
    }
    return result;
}

inline ActiveScalar sqrt(const ActiveScalar& a) {
    const double result = std::sqrt(a.value());
    Tape* tape = currentTape();
    if (tape != nullptr && a.identifier() != passiveId) {
        return tape->recordUnary(Opcode::sqrt, result, a.identifier(), 0.5 / result);
    }
    return result;
}

inline ActiveScalar abs(const ActiveScalar& a) {
    const double result = std::abs(a.value());
    Tape* tape = currentTape();
    if (tape != nullptr && a.identifier() != passiveId) {
        return tape->recordUnary(Opcode::abs, result, a.identifier(), a.value() < 0.0 ? -1.0 : 1.0);
    }
    return result;
}

inline ActiveScalar fabs(const ActiveScalar& a) { return abs(a); }

inline ActiveScalar pow(const ActiveScalar& a, double exponent) {
    const double result = std::pow(a.value(), exponent);
    Tape* tape = currentTape();
    if (tape != nullptr && a.identifier() != passiveId) {
        return tape->recordUnary(Opcode::powConst, result, a.identifier(),
                                 exponent * std::pow(a.value(), exponent - 1.0), exponent);
    }
    return result;
}

// Ties go to the left argument, matching the stored partial convention.
inline ActiveScalar max(const ActiveScalar& a, const ActiveScalar& b) {
    const double result = a.value() >= b.value() ? a.value() : b.value();
    Tape* tape = currentTape();
    if (tape != nullptr) {
        const bool activeA = a.identifier() != passiveId;
        const bool activeB = b.identifier() != passiveId;
        if (activeA && activeB) {
            const bool left = a.value() >= b.value();
            return tape->recordBinary(Opcode::max, result, a.identifier(), b.identifier(),
                                      left ? 1.0 : 0.0, left ? 0.0 : 1.0);
        }
        if (activeA) {
            return tape->recordUnary(Opcode::maxConst, result, a.identifier(),
                                     a.value() >= b.value() ? 1.0 : 0.0, b.value());
        }
        if (activeB) {
            return tape->recordUnary(Opcode::constMax, result, b.identifier(),
                                     a.value() >= b.value() ? 0.0 : 1.0, a.value());
        }
    }
    return result;
}

inline ActiveScalar& ActiveScalar::operator+=(const ActiveScalar& rhs) {
    return *this = *this + rhs;
}
inline ActiveScalar& ActiveScalar::operator-=(const ActiveScalar& rhs) {
    return *this = *this - rhs;
}
inline ActiveScalar& ActiveScalar::operator*=(const ActiveScalar& rhs) {
    return *this = *this * rhs;
}
inline ActiveScalar& ActiveScalar::operator/=(const ActiveScalar& rhs) {
    return *this = *this / rhs;
}
inline ActiveScalar& ActiveScalar::operator+=(double rhs) { return *this = *this + ActiveScalar(rhs); }
inline ActiveScalar& ActiveScalar::operator-=(double rhs) { return *this = *this - ActiveScalar(rhs); }
inline ActiveScalar& ActiveScalar::operator*=(double rhs) { return *this = *this * ActiveScalar(rhs); }
inline ActiveScalar& ActiveScalar::operator/=(double rhs) { return *this = *this / ActiveScalar(rhs); }

} // namespace retape
