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

#include "retape/vec_pow2.hpp"

namespace retape {

void vecPow2(const double* x, std::size_t m, double* y, std::size_t n, UserDataStore*) {
    (void)m;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = x[i] * x[i];
    }
}

void vecPow2Forward(const double* x, const double* xDot, std::size_t m, double* y, double* yDot,
                    std::size_t n, UserDataStore*) {
    (void)m;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = x[i] * x[i];
        yDot[i] = 2.0 * x[i] * xDot[i];
    }
}

void vecPow2Reverse(const double* x, double* xBar, std::size_t m, const double*,
                    const double* yBar, std::size_t n, UserDataStore*) {
    (void)m;
    for (std::size_t i = 0; i < n; ++i) {
        xBar[i] += 2.0 * x[i] * yBar[i];
    }
}

DerivativeTriple vecPow2Triple() { return {vecPow2, vecPow2Forward, vecPow2Reverse}; }

} // namespace retape
