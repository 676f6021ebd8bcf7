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

#include <iosfwd>

#include "retape/types.hpp"

namespace retape {

class Tape;

// Overloaded scalar. Carries the primal value and the identifier of its tape
// slot; identifier 0 means passive (constant with respect to the recording).
// All tape traffic goes through the thread's current tape, so a scalar must
// be used on the thread that owns that tape. Member definitions live at the
// bottom of tape.hpp because they need the Tape interface.
class ActiveScalar {
public:
    ActiveScalar() = default;
    ActiveScalar(double value) : value_(value) {}

    ActiveScalar(const ActiveScalar& other);
    ActiveScalar(ActiveScalar&& other) noexcept;
    ~ActiveScalar();

    ActiveScalar& operator=(double value);
    ActiveScalar& operator=(const ActiveScalar& other);
    ActiveScalar& operator=(ActiveScalar&& other) noexcept;

    double value() const { return value_; }
    Identifier identifier() const { return id_; }

    // Convenience forwarding to the current tape's adjoint vector.
    void setGradient(double seed);
    double gradient() const;

    ActiveScalar& operator+=(const ActiveScalar& rhs);
    ActiveScalar& operator-=(const ActiveScalar& rhs);
    ActiveScalar& operator*=(const ActiveScalar& rhs);
    ActiveScalar& operator/=(const ActiveScalar& rhs);
    ActiveScalar& operator+=(double rhs);
    ActiveScalar& operator-=(double rhs);
    ActiveScalar& operator*=(double rhs);
    ActiveScalar& operator/=(double rhs);

private:
    friend class Tape;

    // Takes ownership of an already-acquired identifier.
    ActiveScalar(double value, Identifier id) : value_(value), id_(id) {}

    double value_ = 0.0;
    Identifier id_ = passiveId;
};

inline bool operator<(const ActiveScalar& a, const ActiveScalar& b) { return a.value() < b.value(); }
inline bool operator>(const ActiveScalar& a, const ActiveScalar& b) { return a.value() > b.value(); }
inline bool operator<=(const ActiveScalar& a, const ActiveScalar& b) { return a.value() <= b.value(); }
inline bool operator>=(const ActiveScalar& a, const ActiveScalar& b) { return a.value() >= b.value(); }
inline bool operator==(const ActiveScalar& a, const ActiveScalar& b) { return a.value() == b.value(); }
inline bool operator!=(const ActiveScalar& a, const ActiveScalar& b) { return a.value() != b.value(); }

std::ostream& operator<<(std::ostream& out, const ActiveScalar& value);

} // namespace retape
