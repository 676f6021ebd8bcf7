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

#include "retape/tape.hpp"

namespace retape {

// Tape variant that stores opcodes instead of partials and keeps every
// value's primal in a dense vector indexed by identifier. The reverse sweep
// recomputes the partials from those primals. Under reuse management a
// statement also stores the primal its identifier overwrote; the sweep swaps
// it with the vector slot on the way back (rewinding the vector so partials
// see recording-time values) and a forward restore pass swaps everything
// back after a full evaluate.
class PrimalValueTape final : public Tape {
public:
    explicit PrimalValueTape(IndexManager::Mode mode);

    Position position() const override;

protected:
    Identifier appendStatement(Opcode op, double result, const Identifier* argIds,
                               const double* partials, std::uint32_t argCount,
                               double constant) override;
    Identifier reserveIdentifier(double value) override;
    Identifier acquireExternalOutput(double value, double& overwritten) override;
    void evaluateReverseImpl(const Position& from, const Position& to) override;
    void restorePrimalValues(const Position& from, const Position& to) override;
    void resetStorage() override;
    void fillStorageStatistics(TapeStatistics& stats) const override;
    double* primalVectorData() override { return primalValues_.data(); }

private:
    bool reuse() const { return indexManager_.mode() == IndexManager::Mode::reuse; }

    // Acquires the lhs identifier, sizes the primal vector, and appends the
    // statement header streams. Returns the identifier.
    Identifier pushHeader(Opcode op, std::uint8_t argCount, double result);

    // Stored constants of one statement: linComb keeps one partial per
    // argument, const-variant opcodes keep their operand.
    static std::uint32_t constantCount(Opcode op, std::uint32_t argCount) {
        return op == Opcode::linComb ? argCount : storedConstants(op);
    }

    ChunkedArray statementArgCounts_;   // u8 per statement
    ChunkedArray statementOpcodes_;     // u16 per statement
    ChunkedArray statementLhs_;         // u32 per statement, reuse mode only
    ChunkedArray statementOverwritten_; // f64 per statement, reuse mode only
    ChunkedArray argumentIds_;          // u32 per argument
    ChunkedArray constants_;            // f64 per stored constant
    TrackedDoubleVector primalValues_;
};

} // namespace retape
