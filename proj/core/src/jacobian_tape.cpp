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

#include "retape/jacobian_tape.hpp"

namespace retape {

JacobianTape::JacobianTape(IndexManager::Mode mode)
    : Tape(mode == IndexManager::Mode::reuse ? TapeKind::jacobianReuse : TapeKind::jacobianLinear),
      statementArgCounts_(1, tracker_),
      statementLhs_(sizeof(Identifier), tracker_),
      argumentIds_(sizeof(Identifier), tracker_),
      partials_(sizeof(double), tracker_) {}

Position JacobianTape::position() const {
    return {statementArgCounts_.size(), entries_.size(), argumentIds_.size(), partials_.size()};
}

Identifier JacobianTape::appendStatement(Opcode, double, const Identifier* argIds,
                                         const double* partials, std::uint32_t argCount, double) {
    const Identifier lhs = indexManager_.acquire();
    statementArgCounts_.push(std::uint8_t(argCount));
    if (reuse()) {
        statementLhs_.push(lhs);
    }
    for (std::uint32_t i = 0; i < argCount; ++i) {
        argumentIds_.push(argIds[i]);
        partials_.push(partials[i]);
    }
    return lhs;
}

Identifier JacobianTape::reserveIdentifier(double) {
    const Identifier id = indexManager_.acquire();
    // The reservation occupies one zero-argument record: linear identifiers
    // must equal statement ordinals (offset by the external function
    // outputs), and keeping the record on reuse tapes as well makes
    // statement counts comparable across all tape kinds.
    statementArgCounts_.push(std::uint8_t(0));
    if (reuse()) {
        statementLhs_.push(id);
    }
    return id;
}

Identifier JacobianTape::acquireExternalOutput(double, double&) {
    return indexManager_.acquire();
}

void JacobianTape::evaluateReverseImpl(const Position& from, const Position& to) {
    std::uint64_t s = from.statement;
    std::uint64_t e = from.entry;
    std::uint64_t arg = from.arguments;

    // On the linear tape an identifier's statement ordinal is shifted by the
    // external-function outputs committed at or before it; that is exactly
    // the summed output count of the entries not yet replayed.
    std::uint64_t pendingOutputs = 0;
    for (std::uint64_t i = to.entry; i < e; ++i) {
        pendingOutputs += entries_[i].outputCount();
    }

    double* adjoint = adjoints_.data();
    while (s > to.statement) {
        while (e > to.entry && entries_[e - 1].position.statement >= s) {
            --e;
            replayExternalFunction(entries_[e]);
            pendingOutputs -= entries_[e].outputCount();
        }
        --s;
        const std::uint8_t count = statementArgCounts_.get<std::uint8_t>(s);
        if (count == 0) {
            // Identifier reservation: its adjoint is a gradient, keep it.
            continue;
        }
        arg -= count;
        const Identifier lhs =
            reuse() ? statementLhs_.get<Identifier>(s) : Identifier(s + 1 + pendingOutputs);
        const double a = adjoint[lhs];
        adjoint[lhs] = 0.0;
        if (a != 0.0) {
            for (std::uint32_t k = 0; k < count; ++k) {
                adjoint[argumentIds_.get<Identifier>(arg + k)] +=
                    partials_.get<double>(arg + k) * a;
            }
        }
    }
    while (e > to.entry) {
        --e;
        replayExternalFunction(entries_[e]);
    }
}

void JacobianTape::resetStorage() {
    statementArgCounts_.clear();
    statementLhs_.clear();
    argumentIds_.clear();
    partials_.clear();
}

void JacobianTape::fillStorageStatistics(TapeStatistics& stats) const {
    stats.statementCount = statementArgCounts_.size();
    stats.argumentCount = argumentIds_.size();
    stats.statementBytes = statementArgCounts_.size() * bytesPerArgCount;
    stats.jacobianBytes = partials_.size() * bytesPerReal;
    stats.identifierBytes = argumentIds_.size() * bytesPerIdentifier +
                            (reuse() ? statementLhs_.size() * bytesPerIdentifier : 0);
}

} // namespace retape
