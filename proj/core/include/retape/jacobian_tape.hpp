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

// Tape variant that evaluates and stores the partial derivatives of every
// statement at recording time. The reverse sweep is then pure data
// traversal. Storage per statement: one argument-count byte (plus the lhs
// identifier under reuse management) and, per argument, the identifier and
// the partial.
class JacobianTape final : public Tape {
public:
    explicit JacobianTape(IndexManager::Mode mode);

    Position position() const override;

protected:
    Identifier appendStatement(Opcode op, double result, const Identifier* argIds,
                               const double* partials, std::uint32_t argCount,
                               double constant) override;
    Identifier reserveIdentifier(double value) override;
    Identifier acquireExternalOutput(double value, double& overwritten) override;
    void evaluateReverseImpl(const Position& from, const Position& to) override;
    void resetStorage() override;
    void fillStorageStatistics(TapeStatistics& stats) const override;

private:
    bool reuse() const { return indexManager_.mode() == IndexManager::Mode::reuse; }

    ChunkedArray statementArgCounts_;  // u8 per statement
    ChunkedArray statementLhs_;        // u32 per statement, reuse mode only
    ChunkedArray argumentIds_;         // u32 per argument
    ChunkedArray partials_;            // f64 per argument
};

} // namespace retape
