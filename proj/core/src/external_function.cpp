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

#include "retape/external_function.hpp"

#include <functional>

#include "retape/tape.hpp"

namespace retape {

ExternalFunctionHelper::ExternalFunctionHelper() : tape_(currentTape()) {
    if (tape_ == nullptr) {
        throw Error("ExternalFunctionHelper: no current tape");
    }
}

ExternalFunctionHelper::ExternalFunctionHelper(Tape& tape) : tape_(&tape) {}

void ExternalFunctionHelper::addInput(const ActiveScalar& value) {
    if (committed_) {
        throw Error("ExternalFunctionHelper: entry already committed");
    }
    inputIds_.push_back(value.identifier());
    inputPrimals_.push_back(value.value());
}

void ExternalFunctionHelper::addOutput(ActiveScalar& value) {
    if (committed_) {
        throw Error("ExternalFunctionHelper: entry already committed");
    }
    outputs_.push_back(&value);
}

void ExternalFunctionHelper::addToTape(const DerivativeTriple& triple) {
    if (committed_) {
        throw Error("ExternalFunctionHelper: entry already committed");
    }
    tape_->commitExternalFunction(triple, std::move(inputIds_), std::move(inputPrimals_), outputs_,
                                  std::move(userData_), storeOutputPrimals_);
    committed_ = true;
}

GeneratedFunctionHelper::GeneratedFunctionHelper() = default;

GeneratedFunctionHelper::GeneratedFunctionHelper(Tape& tape) : helper_(tape) {}

void GeneratedFunctionHelper::addToTape(const DerivativeTriple& triple, const ActiveScalar* x,
                                        std::size_t m, ActiveScalar* y, std::size_t n) {
    if (m > 0 && n > 0) {
        const std::less<const void*> before;
        if (before(x, y + n) && before(y, x + m)) {
            throw Error("GeneratedFunctionHelper: input and output ranges overlap");
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        helper_.addInput(x[i]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        helper_.addOutput(y[j]);
    }
    helper_.addToTape(triple);
}

} // namespace retape
