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

#include "retape/primal_value_tape.hpp"

#include <utility>

namespace retape {

namespace {

void swapOutputPrimals(ExternalFunctionEntry& entry, double* primal) {
    for (std::size_t j = 0; j < entry.outputIds.size(); ++j) {
        std::swap(entry.outputPrimals[j], primal[entry.outputIds[j]]);
    }
}

} // namespace

PrimalValueTape::PrimalValueTape(IndexManager::Mode mode)
    : Tape(mode == IndexManager::Mode::reuse ? TapeKind::primalValueReuse
                                             : TapeKind::primalValueLinear),
      statementArgCounts_(1, tracker_),
      statementOpcodes_(sizeof(std::uint16_t), tracker_),
      statementLhs_(sizeof(Identifier), tracker_),
      statementOverwritten_(sizeof(double), tracker_),
      argumentIds_(sizeof(Identifier), tracker_),
      constants_(sizeof(double), tracker_),
      primalValues_(tracker_) {}

Position PrimalValueTape::position() const {
    return {statementArgCounts_.size(), entries_.size(), argumentIds_.size(), constants_.size()};
}

Identifier PrimalValueTape::pushHeader(Opcode op, std::uint8_t argCount, double result) {
    const Identifier lhs = indexManager_.acquire();
    primalValues_.ensureSize(std::size_t(indexManager_.largestAssigned()) + 1);
    statementArgCounts_.push(argCount);
    statementOpcodes_.push(std::uint16_t(op));
    if (reuse()) {
        statementLhs_.push(lhs);
        statementOverwritten_.push(primalValues_[lhs]);
    }
    primalValues_[lhs] = result;
    return lhs;
}

Identifier PrimalValueTape::appendStatement(Opcode op, double result, const Identifier* argIds,
                                            const double* partials, std::uint32_t argCount,
                                            double constant) {
    const Identifier lhs = pushHeader(op, std::uint8_t(argCount), result);
    for (std::uint32_t i = 0; i < argCount; ++i) {
        argumentIds_.push(argIds[i]);
    }
    if (op == Opcode::linComb) {
        for (std::uint32_t i = 0; i < argCount; ++i) {
            constants_.push(partials[i]);
        }
    } else if (storedConstants(op) == 1) {
        constants_.push(constant);
    }
    return lhs;
}

Identifier PrimalValueTape::reserveIdentifier(double value) {
    return pushHeader(Opcode::input, 0, value);
}

Identifier PrimalValueTape::acquireExternalOutput(double value, double& overwritten) {
    const Identifier id = indexManager_.acquire();
    primalValues_.ensureSize(std::size_t(indexManager_.largestAssigned()) + 1);
    overwritten = primalValues_[id];
    primalValues_[id] = value;
    return id;
}

void PrimalValueTape::evaluateReverseImpl(const Position& from, const Position& to) {
    std::uint64_t s = from.statement;
    std::uint64_t e = from.entry;
    std::uint64_t arg = from.arguments;
    std::uint64_t con = from.constants;

    // On the linear tape an identifier's statement ordinal is shifted by the
    // external-function outputs committed at or before it; that is exactly
    // the summed output count of the entries not yet replayed.
    std::uint64_t pendingOutputs = 0;
    for (std::uint64_t i = to.entry; i < e; ++i) {
        pendingOutputs += entries_[i].outputCount();
    }

    double* adjoint = adjoints_.data();
    double* primal = primalValues_.data();
    double partials[2];
    while (s > to.statement) {
        while (e > to.entry && entries_[e - 1].position.statement >= s) {
            --e;
            replayExternalFunction(entries_[e]);
            pendingOutputs -= entries_[e].outputCount();
        }
        --s;
        const std::uint8_t count = statementArgCounts_.get<std::uint8_t>(s);
        const Opcode op = Opcode(statementOpcodes_.get<std::uint16_t>(s));
        Identifier lhs;
        if (reuse()) {
            // Rewind the primal vector so the argument reads below see the
            // recording-time values. The lhs never aliases an argument of
            // its own statement, so swap order does not matter.
            lhs = statementLhs_.get<Identifier>(s);
            const double overwritten = statementOverwritten_.get<double>(s);
            statementOverwritten_.write(s, &primal[lhs]);
            primal[lhs] = overwritten;
        } else {
            lhs = Identifier(s + 1 + pendingOutputs);
        }
        if (count == 0) {
            // Identifier reservation: its adjoint is a gradient, keep it.
            continue;
        }
        arg -= count;
        con -= constantCount(op, count);
        const double a = adjoint[lhs];
        adjoint[lhs] = 0.0;
        if (a == 0.0) {
            continue;
        }
        if (op == Opcode::linComb) {
            for (std::uint32_t k = 0; k < count; ++k) {
                adjoint[argumentIds_.get<Identifier>(arg + k)] +=
                    constants_.get<double>(con + k) * a;
            }
        } else if (count == 2) {
            const Identifier id1 = argumentIds_.get<Identifier>(arg);
            const Identifier id2 = argumentIds_.get<Identifier>(arg + 1);
            computePartials(op, primal[id1], primal[id2], 0.0, partials);
            adjoint[id1] += partials[0] * a;
            adjoint[id2] += partials[1] * a;
        } else {
            const Identifier id1 = argumentIds_.get<Identifier>(arg);
            const double c = storedConstants(op) == 1 ? constants_.get<double>(con) : 0.0;
            computePartials(op, primal[id1], 0.0, c, partials);
            adjoint[id1] += partials[0] * a;
        }
    }
    while (e > to.entry) {
        --e;
        replayExternalFunction(entries_[e]);
    }
}

void PrimalValueTape::restorePrimalValues(const Position& from, const Position& to) {
    if (!reuse()) {
        return;
    }
    // The reverse sweep applied a sequence of primal swaps; repeating them in
    // forward order is its exact inverse, restoring every buffer bitwise.
    double* primal = primalValues_.data();
    std::uint64_t e = to.entry;
    for (std::uint64_t s = to.statement; s < from.statement; ++s) {
        while (e < from.entry && entries_[e].position.statement <= s) {
            swapOutputPrimals(entries_[e], primal);
            ++e;
        }
        const Identifier lhs = statementLhs_.get<Identifier>(s);
        const double overwritten = statementOverwritten_.get<double>(s);
        statementOverwritten_.write(s, &primal[lhs]);
        primal[lhs] = overwritten;
    }
    while (e < from.entry) {
        swapOutputPrimals(entries_[e], primal);
        ++e;
    }
}

void PrimalValueTape::resetStorage() {
    statementArgCounts_.clear();
    statementOpcodes_.clear();
    statementLhs_.clear();
    statementOverwritten_.clear();
    argumentIds_.clear();
    constants_.clear();
    primalValues_.clear();
}

void PrimalValueTape::fillStorageStatistics(TapeStatistics& stats) const {
    const std::uint64_t k = statementArgCounts_.size();
    stats.statementCount = k;
    stats.argumentCount = argumentIds_.size();
    stats.statementBytes = k * (bytesPerArgCount + bytesPerOpcode) +
                           constants_.size() * bytesPerReal + (reuse() ? k * bytesPerReal : 0);
    stats.identifierBytes = argumentIds_.size() * bytesPerIdentifier +
                            (reuse() ? statementLhs_.size() * bytesPerIdentifier : 0);
    stats.primalVectorBytes = primalValues_.size() * bytesPerReal;
}

} // namespace retape
