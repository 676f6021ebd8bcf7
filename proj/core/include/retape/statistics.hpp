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

#include <cstdint>

namespace retape {

// Byte counts are derived from logical record counts times the fixed
// per-element sizes in types.hpp, never from allocator introspection.
//
// statementBytes     per-record fixed data: the argument count byte, plus on
//                    primal value tapes the opcode, stored passive constants
//                    and (reuse variant) the overwritten primal.
// jacobianBytes      stored partial derivatives (Jacobian tapes only).
// identifierBytes    argument identifiers, plus the explicit left-hand-side
//                    identifier on reuse tapes.
// primalVectorBytes  live size of the primal value vector (primal tapes).
// externalFunctionBytes      full accounted cost of committed entries: fixed
//                    overhead, input/output identifiers, stored input
//                    primals, optional output primals, and user data.
// externalFunctionDataBytes  the data portion of the above: stored input
//                    primals (dropped when the tape recovers them from the
//                    primal value vector) plus user data payloads.
// highWatermarkBytes maximum concurrent tracked buffer total over the run;
//                    survives reset().
//
// statementCount counts every record on the statement stream, including the
// zero-argument identifier reservations pushed for registered inputs.
// External-function outputs take no records; linear tapes account for them
// with a running offset instead.
struct TapeStatistics {
    std::uint64_t statementBytes = 0;
    std::uint64_t jacobianBytes = 0;
    std::uint64_t identifierBytes = 0;
    std::uint64_t primalVectorBytes = 0;
    std::uint64_t externalFunctionBytes = 0;
    std::uint64_t externalFunctionDataBytes = 0;
    std::uint64_t highWatermarkBytes = 0;
    std::uint64_t statementCount = 0;
    std::uint64_t argumentCount = 0;
    std::uint64_t externalFunctionCount = 0;

    // Recorded tape memory without external-function data.
    std::uint64_t tapeMemoryBytes() const {
        return statementBytes + jacobianBytes + identifierBytes + primalVectorBytes;
    }
};

} // namespace retape
