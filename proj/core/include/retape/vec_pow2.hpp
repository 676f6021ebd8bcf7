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

#include "retape/external_function.hpp"

namespace retape {

// Elementwise square, the smallest useful external function: y_i = x_i^2.
// Serves as the worked example and as a known-good derivative triple for the
// verification tests.
void vecPow2(const double* x, std::size_t m, double* y, std::size_t n, UserDataStore* d);
void vecPow2Forward(const double* x, const double* xDot, std::size_t m, double* y, double* yDot,
                    std::size_t n, UserDataStore* d);
void vecPow2Reverse(const double* x, double* xBar, std::size_t m, const double* y,
                    const double* yBar, std::size_t n, UserDataStore* d);

DerivativeTriple vecPow2Triple();

} // namespace retape
