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
#include <vector>

#include "retape/external_function.hpp"
#include "retape/user_data.hpp"

namespace retape {

struct VerificationReport {
    // max over trials of ||yDot_fd - yDot||_inf / max(1, ||yDot||_inf)
    double maxForwardRelativeError = 0.0;
    // max over trials of |<yBar, yDot> - <xBar, xDot>| / (1 + |<yBar, yDot>|)
    double maxDotProductResidual = 0.0;
    std::size_t trials = 0;
    bool passed = false;
};

inline constexpr double forwardVerifyTolerance = 1e-4;
inline constexpr double dotProductVerifyTolerance = 1e-10;

// Checks that a derivative triple is internally consistent at the point x:
// the forward callback against central finite differences of the primal
// (step 1e-6), and the reverse callback against the forward one through the
// dot-product identity <yBar, yDot> == <xBar, xDot>. Random seed directions
// are drawn per trial from the given generator seed, so reports are
// reproducible. Failures are reported in the returned struct, never thrown.
VerificationReport verifyDerivativeTriple(const DerivativeTriple& triple,
                                          const std::vector<double>& x, UserDataStore userData,
                                          std::size_t outputCount, std::size_t trials = 20,
                                          std::uint64_t seed = 0x2545f4914f6cdd1dull);

} // namespace retape
