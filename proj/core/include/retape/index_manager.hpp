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
#include <vector>

#include "retape/types.hpp"

namespace retape {

// Hands out value identifiers for a tape.
//
// Linear mode: strictly increasing identifiers 1, 2, 3, ...; retain/release
// are no-ops because every identifier lives until reset. The caller keeps
// identifiers in sync with record ordinals.
//
// Reuse mode: freed identifiers go to a LIFO pool and are handed out again.
// Identifiers are reference counted so that the copy optimization can share
// one identifier between several values. pin() adds a reference that is never
// dropped, keeping registered inputs and outputs stable until reset.
class IndexManager {
public:
    enum class Mode { linear, reuse };

    explicit IndexManager(Mode mode) : mode_(mode) {}

    Mode mode() const { return mode_; }

    Identifier acquire() {
        if (mode_ == Mode::reuse && !freeList_.empty()) {
            const Identifier id = freeList_.back();
            freeList_.pop_back();
            referenceCounts_[id] = 1;
            return id;
        }
        const Identifier id = ++largestAssigned_;
        if (mode_ == Mode::reuse) {
            referenceCounts_.resize(std::size_t(largestAssigned_) + 1, 0);
            referenceCounts_[id] = 1;
        }
        return id;
    }

    void retain(Identifier id) {
        if (mode_ == Mode::reuse && id != passiveId && id < referenceCounts_.size()) {
            ++referenceCounts_[id];
        }
    }

    void release(Identifier id) {
        if (mode_ != Mode::reuse || id == passiveId || id >= referenceCounts_.size() ||
            referenceCounts_[id] == 0) {
            return;
        }
        if (--referenceCounts_[id] == 0) {
            freeList_.push_back(id);
        }
    }

    void pin(Identifier id) { retain(id); }

    // Highest identifier ever assigned since the last reset. Bounds the
    // adjoint and primal value vectors.
    Identifier largestAssigned() const { return largestAssigned_; }

    void reset() {
        largestAssigned_ = 0;
        freeList_.clear();
        referenceCounts_.clear();
    }

private:
    Mode mode_;
    Identifier largestAssigned_ = 0;
    std::vector<Identifier> freeList_;
    std::vector<std::uint32_t> referenceCounts_;
};

} // namespace retape
