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
#include <stdexcept>
#include <string>

namespace retape {

// Identifier of a value on a tape. 0 is the passive identifier: values that
// carry it are constants as far as differentiation is concerned.
using Identifier = std::uint32_t;

inline constexpr Identifier passiveId = 0;

enum class TapeKind {
    jacobianLinear,
    jacobianReuse,
    primalValueLinear,
    primalValueReuse,
};

constexpr bool isPrimalValueKind(TapeKind kind) {
    return kind == TapeKind::primalValueLinear || kind == TapeKind::primalValueReuse;
}

constexpr bool isReuseKind(TapeKind kind) {
    return kind == TapeKind::jacobianReuse || kind == TapeKind::primalValueReuse;
}

const char* tapeKindName(TapeKind kind);

// Parses the names used by the CLI ("jacobian-linear", "jacobian-reuse",
// "primal-linear", "primal-reuse"). Throws Error on anything else.
TapeKind parseTapeKind(const std::string& name);

// A point in the recorded event sequence. Statements and external-function
// entries advance independently; the argument and constant counters are
// stream offsets needed to resume a partial reverse sweep.
struct Position {
    std::uint64_t statement = 0;
    std::uint64_t entry = 0;
    std::uint64_t arguments = 0;
    std::uint64_t constants = 0;

    friend bool operator==(const Position&, const Position&) = default;
};

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Sizes used by the byte accounting. These are logical sizes per recorded
// element, fixed by the storage layout, not measurements of allocator
// behaviour.
inline constexpr std::uint64_t bytesPerReal = 8;
inline constexpr std::uint64_t bytesPerIdentifier = 4;
inline constexpr std::uint64_t bytesPerArgCount = 1;
inline constexpr std::uint64_t bytesPerOpcode = 2;

// Fixed bookkeeping cost accounted to every external-function entry
// (callbacks, id vectors, counts). Pinned so that memory predictions are
// exact integers.
inline constexpr std::uint64_t externalFunctionOverheadBytes = 256;

} // namespace retape
