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

#include "retape/verify.hpp"

#include <cmath>
#include <random>

namespace retape {

namespace {

// Unit-norm random direction; a fixed norm keeps the finite-difference step
// meaningful regardless of dimension.
void randomDirection(std::mt19937_64& rng, std::vector<double>& direction) {
    std::normal_distribution<double> normal(0.0, 1.0);
    double norm2 = 0.0;
    for (double& d : direction) {
        d = normal(rng);
        norm2 += d * d;
    }
    const double norm = std::sqrt(norm2);
    if (norm > 0.0) {
        for (double& d : direction) {
            d /= norm;
        }
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

} // namespace

VerificationReport verifyDerivativeTriple(const DerivativeTriple& triple,
                                          const std::vector<double>& x, UserDataStore userData,
                                          std::size_t outputCount, std::size_t trials,
                                          std::uint64_t seed) {
    const std::size_t m = x.size();
    const std::size_t n = outputCount;
    const double h = 1e-6;

    VerificationReport report;
    report.trials = trials;

    std::mt19937_64 rng(seed);
    std::vector<double> xDot(m), xBar(m), xShift(m);
    std::vector<double> y(n), yDot(n), yBar(n), yPlus(n), yMinus(n);

    // Every callback may consume the user data, so it is rewound before each
    // invocation.
    auto primal = [&](const std::vector<double>& point, std::vector<double>& out) {
        userData.rewind();
        triple.primal(point.data(), m, out.data(), n, &userData);
    };

    for (std::size_t trial = 0; trial < trials; ++trial) {
        randomDirection(rng, xDot);

        userData.rewind();
        triple.forward(x.data(), xDot.data(), m, y.data(), yDot.data(), n, &userData);

        // Central differences of the primal along xDot.
        for (std::size_t i = 0; i < m; ++i) {
            xShift[i] = x[i] + h * xDot[i];
        }
        primal(xShift, yPlus);
        for (std::size_t i = 0; i < m; ++i) {
            xShift[i] = x[i] - h * xDot[i];
        }
        primal(xShift, yMinus);

        double maxDiff = 0.0;
        double maxDot = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double fd = (yPlus[j] - yMinus[j]) / (2.0 * h);
            maxDiff = std::max(maxDiff, std::abs(fd - yDot[j]));
            maxDot = std::max(maxDot, std::abs(yDot[j]));
        }
        const double forwardError = maxDiff / std::max(1.0, maxDot);
        report.maxForwardRelativeError = std::max(report.maxForwardRelativeError, forwardError);

        // Reverse consistency: <yBar, yDot> must equal <xBar, xDot> for any
        // seed pair.
        randomDirection(rng, yBar);
        for (double& b : xBar) {
            b = 0.0;
        }
        userData.rewind();
        triple.reverse(x.data(), xBar.data(), m, y.data(), yBar.data(), n, &userData);

        const double lhs = dot(yBar, yDot);
        const double rhs = dot(xBar, xDot);
        const double residual = std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
        report.maxDotProductResidual = std::max(report.maxDotProductResidual, residual);
    }

    report.passed = report.maxForwardRelativeError <= forwardVerifyTolerance &&
                    report.maxDotProductResidual <= dotProductVerifyTolerance;
    return report;
}

} // namespace retape
