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

#include "retape/tape.hpp"

#include <algorithm>
#include <ostream>

#include "retape/jacobian_tape.hpp"
#include "retape/primal_value_tape.hpp"

namespace retape {

namespace detail {

Tape*& currentTapePointer() {
    thread_local Tape* current = nullptr;
    return current;
}

} // namespace detail

const char* tapeKindName(TapeKind kind) {
    switch (kind) {
    case TapeKind::jacobianLinear:
        return "jacobian-linear";
    case TapeKind::jacobianReuse:
        return "jacobian-reuse";
    case TapeKind::primalValueLinear:
        return "primal-linear";
    case TapeKind::primalValueReuse:
        return "primal-reuse";
    }
    return "unknown";
}

TapeKind parseTapeKind(const std::string& name) {
    if (name == "jacobian-linear") {
        return TapeKind::jacobianLinear;
    }
    if (name == "jacobian-reuse") {
        return TapeKind::jacobianReuse;
    }
    if (name == "primal-linear") {
        return TapeKind::primalValueLinear;
    }
    if (name == "primal-reuse") {
        return TapeKind::primalValueReuse;
    }
    throw Error("unknown tape kind '" + name +
                "' (expected jacobian-linear, jacobian-reuse, primal-linear, or primal-reuse)");
}

std::ostream& operator<<(std::ostream& out, const ActiveScalar& value) {
    return out << value.value();
}

Tape::Tape(TapeKind kind)
    : kind_(kind),
      indexManager_(isReuseKind(kind) ? IndexManager::Mode::reuse : IndexManager::Mode::linear),
      adjoints_(tracker_) {
    previousTape_ = detail::currentTapePointer();
    detail::currentTapePointer() = this;
}

Tape::~Tape() {
    if (detail::currentTapePointer() == this) {
        detail::currentTapePointer() = previousTape_;
    }
}

void Tape::registerInput(ActiveScalar& value) {
    if (!recording_) {
        throw Error("registerInput requires active recording");
    }
    const Identifier id = reserveIdentifier(value.value_);
    indexManager_.pin(id);
    inputIds_.push_back(id);
    const Identifier old = value.id_;
    value.id_ = id;
    releaseIdentifier(old);
}

void Tape::registerOutput(ActiveScalar& value) {
    if (!recording_) {
        throw Error("registerOutput requires active recording");
    }
    if (value.id_ == passiveId) {
        throw Error("registerOutput on a passive value: the output is a constant with respect "
                    "to the recording");
    }
    indexManager_.pin(value.id_);
}

void Tape::recordStatement(ActiveScalar& lhs, const std::pair<Identifier, double>* args,
                           std::size_t argCount, double primalResult) {
    if (recording_) {
        std::vector<Identifier> ids;
        std::vector<double> partials;
        ids.reserve(argCount);
        partials.reserve(argCount);
        for (std::size_t i = 0; i < argCount; ++i) {
            if (args[i].first != passiveId) {
                ids.push_back(args[i].first);
                partials.push_back(args[i].second);
            }
        }
        if (!ids.empty()) {
            if (ids.size() > 255) {
                throw Error("recordStatement: more than 255 active arguments");
            }
            const Identifier id = appendStatement(Opcode::linComb, primalResult, ids.data(),
                                                  partials.data(), std::uint32_t(ids.size()), 0.0);
            const Identifier old = lhs.id_;
            lhs.id_ = id;
            lhs.value_ = primalResult;
            releaseIdentifier(old);
            return;
        }
    }
    // Passive outcome: not recording, or no active arguments survived.
    const Identifier old = lhs.id_;
    lhs.id_ = passiveId;
    lhs.value_ = primalResult;
    releaseIdentifier(old);
}

void Tape::recordStatement(ActiveScalar& lhs,
                           std::initializer_list<std::pair<Identifier, double>> args,
                           double primalResult) {
    recordStatement(lhs, args.begin(), args.size(), primalResult);
}

void Tape::setGradient(Identifier id, double seed) {
    if (id == passiveId) {
        throw Error("setGradient on a passive value");
    }
    adjoints_.ensureSize(std::max<std::size_t>(std::size_t(id) + 1,
                                               std::size_t(indexManager_.largestAssigned()) + 1));
    // Accumulate: several outputs sharing one identifier all contribute.
    adjoints_[id] += seed;
}

double Tape::getGradient(Identifier id) const {
    if (id == passiveId || std::size_t(id) >= adjoints_.size()) {
        return 0.0;
    }
    return adjoints_[id];
}

void Tape::evaluate() {
    const Position from = position();
    if (from.statement == 0 && from.entry == 0) {
        throw Error("evaluate on an empty tape");
    }
    if (!isReuseKind(kind_)) {
        // Consume the previous sweep's results so each evaluate yields
        // exactly its own seeds' gradients. Reuse tapes must not do this:
        // with copy optimization an output may alias an input slot, and the
        // seed sitting there has to survive into the sweep.
        ensureAdjointSize();
        for (const Identifier id : inputIds_) {
            adjoints_[id] = 0.0;
        }
    }
    const Position origin;
    evaluateReverse(from, origin);
    restorePrimalValues(from, origin);
}

void Tape::evaluateReverse(const Position& from, const Position& to) {
    const Position current = position();
    const auto ordered = [](const Position& a, const Position& b) {
        return a.statement >= b.statement && a.entry >= b.entry && a.arguments >= b.arguments &&
               a.constants >= b.constants;
    };
    if (!ordered(current, from) || !ordered(from, to)) {
        throw Error("evaluateReverse: invalid position range");
    }
    ensureAdjointSize();
    evaluateReverseImpl(from, to);
}

void Tape::restorePrimalValues(const Position&, const Position&) {}

void Tape::reset() {
    for (const ExternalFunctionEntry& entry : entries_) {
        tracker_.release(trackedEntryBytes(entry));
    }
    entries_.clear();
    adjoints_.clear();
    inputIds_.clear();
    indexManager_.reset();
    resetStorage();
}

TapeStatistics Tape::statistics() const {
    TapeStatistics stats;
    fillStorageStatistics(stats);
    for (const ExternalFunctionEntry& entry : entries_) {
        stats.externalFunctionBytes += entry.accountedBytes() + entry.userData.byteSize();
        stats.externalFunctionDataBytes += entry.dataBytes();
    }
    stats.externalFunctionCount = entries_.size();
    stats.highWatermarkBytes = tracker_.peakBytes();
    return stats;
}

ActiveScalar Tape::recordUnary(Opcode op, double result, Identifier arg, double partial,
                               double constant) {
    if (!recording_ || arg == passiveId) {
        return ActiveScalar(result);
    }
    const Identifier id = appendStatement(op, result, &arg, &partial, 1, constant);
    return ActiveScalar(result, id);
}

ActiveScalar Tape::recordBinary(Opcode op, double result, Identifier argA, Identifier argB,
                                double partialA, double partialB) {
    if (!recording_ || argA == passiveId || argB == passiveId) {
        return ActiveScalar(result);
    }
    const Identifier args[2] = {argA, argB};
    const double partials[2] = {partialA, partialB};
    const Identifier id = appendStatement(op, result, args, partials, 2, 0.0);
    return ActiveScalar(result, id);
}

Identifier Tape::recordCopy(double value, Identifier srcId) {
    if (!recording_ || srcId == passiveId) {
        return passiveId;
    }
    if (copyOptimization_ && indexManager_.mode() == IndexManager::Mode::reuse) {
        indexManager_.retain(srcId);
        return srcId;
    }
    const double partial = 1.0;
    return appendStatement(Opcode::copy, value, &srcId, &partial, 1, 0.0);
}

void Tape::releaseIdentifier(Identifier id) {
    if (id != passiveId) {
        indexManager_.release(id);
    }
}

void Tape::commitExternalFunction(const DerivativeTriple& triple,
                                  std::vector<Identifier>&& inputIds,
                                  std::vector<double>&& inputPrimals,
                                  const std::vector<ActiveScalar*>& outputs,
                                  UserDataStore&& userData, bool storeOutputPrimals) {
    if (!recording_) {
        throw Error("external functions require active recording");
    }
    if (!triple.primal || !triple.reverse) {
        throw Error("derivative triple is missing its primal or reverse callback");
    }
    const std::size_t m = inputIds.size();
    const std::size_t n = outputs.size();

    ExternalFunctionEntry entry;
    entry.reverse = triple.reverse;
    entry.forward = triple.forward;
    entry.userData = std::move(userData);
    entry.gatherInputsFromPrimalVector = isPrimalValueKind(kind_) && primalValueHandling_;
    entry.hasOutputPrimals = storeOutputPrimals || kind_ == TapeKind::primalValueReuse;

    std::vector<double> y(n, 0.0);
    entry.userData.rewind();
    triple.primal(inputPrimals.data(), m, y.data(), n, &entry.userData);

    // Hold the inputs while the outputs acquire identifiers, so an input id
    // freed by an output assignment cannot be recycled within this commit.
    for (const Identifier id : inputIds) {
        indexManager_.retain(id);
    }
    entry.outputIds.resize(n);
    if (entry.hasOutputPrimals) {
        entry.outputPrimals.assign(n, 0.0);
    }
    for (std::size_t j = 0; j < n; ++j) {
        double overwritten = 0.0;
        const Identifier id = acquireExternalOutput(y[j], overwritten);
        entry.outputIds[j] = id;
        if (kind_ == TapeKind::primalValueReuse) {
            entry.outputPrimals[j] = overwritten;
        } else if (entry.hasOutputPrimals) {
            entry.outputPrimals[j] = y[j];
        }
        ActiveScalar& out = *outputs[j];
        const Identifier old = out.id_;
        out.id_ = id;
        out.value_ = y[j];
        releaseIdentifier(old);
    }
    for (const Identifier id : inputIds) {
        indexManager_.release(id);
    }

    if (entry.gatherInputsFromPrimalVector) {
        for (std::size_t i = 0; i < m; ++i) {
            if (inputIds[i] == passiveId) {
                entry.passiveInputs.emplace_back(i, inputPrimals[i]);
            }
        }
    } else {
        entry.inputPrimals = std::move(inputPrimals);
    }
    entry.inputIds = std::move(inputIds);
    entry.position = position();

    tracker_.allocate(trackedEntryBytes(entry));
    entries_.push_back(std::move(entry));
}

std::uint64_t Tape::trackedEntryBytes(const ExternalFunctionEntry& entry) const {
    return entry.accountedBytes() + entry.userData.byteSize() +
           entry.passiveInputs.size() * (sizeof(std::size_t) + sizeof(double));
}

void Tape::replayExternalFunction(ExternalFunctionEntry& entry) {
    const std::size_t m = entry.inputIds.size();
    const std::size_t n = entry.outputIds.size();
    double* primalVec = primalVectorData();

    std::vector<double> yBar(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Identifier id = entry.outputIds[j];
        yBar[j] = adjoints_[id];
        adjoints_[id] = 0.0;
    }

    std::vector<double> gathered;
    const double* x = nullptr;
    if (entry.gatherInputsFromPrimalVector) {
        gathered.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            gathered[i] = entry.inputIds[i] != passiveId ? primalVec[entry.inputIds[i]] : 0.0;
        }
        for (const auto& [pos, value] : entry.passiveInputs) {
            gathered[pos] = value;
        }
        x = gathered.data();
    } else {
        x = entry.inputPrimals.data();
    }

    // y is recoverable from the primal vector on primal value tapes (the
    // sweep has rewound it to the state right after this entry executed),
    // from the entry itself when output primals were stored, and is null
    // otherwise.
    std::vector<double> yFromVector;
    const double* y = nullptr;
    if (isPrimalValueKind(kind_)) {
        yFromVector.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            yFromVector[j] = primalVec[entry.outputIds[j]];
        }
        y = yFromVector.data();
    } else if (entry.hasOutputPrimals) {
        y = entry.outputPrimals.data();
    }

    std::vector<double> xBar(m, 0.0);
    entry.userData.rewind();
    entry.reverse(x, xBar.data(), m, y, yBar.data(), n, &entry.userData);
    for (std::size_t i = 0; i < m; ++i) {
        if (entry.inputIds[i] != passiveId) {
            adjoints_[entry.inputIds[i]] += xBar[i];
        }
    }

    // Rewind the output slots to their pre-entry content; the buffer now
    // holds y until the forward restore pass swaps it back.
    if (kind_ == TapeKind::primalValueReuse) {
        for (std::size_t j = 0; j < n; ++j) {
            std::swap(entry.outputPrimals[j], primalVec[entry.outputIds[j]]);
        }
    }
}

std::unique_ptr<Tape> makeTape(TapeKind kind) {
    switch (kind) {
    case TapeKind::jacobianLinear:
        return std::make_unique<JacobianTape>(IndexManager::Mode::linear);
    case TapeKind::jacobianReuse:
        return std::make_unique<JacobianTape>(IndexManager::Mode::reuse);
    case TapeKind::primalValueLinear:
        return std::make_unique<PrimalValueTape>(IndexManager::Mode::linear);
    case TapeKind::primalValueReuse:
        return std::make_unique<PrimalValueTape>(IndexManager::Mode::reuse);
    }
    throw Error("unknown tape kind");
}

} // namespace retape
