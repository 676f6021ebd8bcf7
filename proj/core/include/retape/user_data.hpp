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
#include <type_traits>
#include <vector>

#include "retape/types.hpp"

namespace retape {

// Typed FIFO of plain values attached to an external-function entry. Values
// come back in the order they were added; the read cursor is rewound by the
// framework before every callback invocation, so a callback always sees the
// full sequence from the start. Reading past the end or with the wrong type
// throws. The payload size (sum of value sizes) counts toward a tape's
// externalFunctionDataBytes.
class UserDataStore {
public:
    template <typename T>
    void addData(T value) {
        static_assert(isSupported<T>(), "unsupported user data type");
        Slot slot;
        slot.tag = tagOf<T>();
        slot.bytes = sizeof(T);
        store(slot, value);
        slots_.push_back(slot);
        payloadBytes_ += slot.bytes;
    }

    template <typename T>
    T getData() {
        static_assert(isSupported<T>(), "unsupported user data type");
        if (cursor_ >= slots_.size()) {
            throw Error("UserDataStore: read past the end of the stored data");
        }
        const Slot& slot = slots_[cursor_];
        if (slot.tag != tagOf<T>()) {
            throw Error("UserDataStore: stored type does not match the requested type");
        }
        ++cursor_;
        return load<T>(slot);
    }

    void rewind() { cursor_ = 0; }

    std::size_t count() const { return slots_.size(); }
    std::uint64_t byteSize() const { return payloadBytes_; }

private:
    enum class Tag : std::uint8_t { real, size, int64, int32 };

    struct Slot {
        Tag tag;
        std::uint8_t bytes;
        union {
            double real;
            std::uint64_t size;
            std::int64_t int64;
            std::int32_t int32;
        };
    };

    template <typename T>
    static constexpr bool isSupported() {
        return std::is_same_v<T, double> || std::is_same_v<T, std::size_t> ||
               std::is_same_v<T, std::int64_t> || std::is_same_v<T, std::int32_t>;
    }

    template <typename T>
    static constexpr Tag tagOf() {
        if constexpr (std::is_same_v<T, double>) {
            return Tag::real;
        } else if constexpr (std::is_same_v<T, std::size_t>) {
            return Tag::size;
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
            return Tag::int64;
        } else {
            return Tag::int32;
        }
    }

    template <typename T>
    static void store(Slot& slot, T value) {
        if constexpr (std::is_same_v<T, double>) {
            slot.real = value;
        } else if constexpr (std::is_same_v<T, std::size_t>) {
            slot.size = value;
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
            slot.int64 = value;
        } else {
            slot.int32 = value;
        }
    }

    template <typename T>
    static T load(const Slot& slot) {
        if constexpr (std::is_same_v<T, double>) {
            return slot.real;
        } else if constexpr (std::is_same_v<T, std::size_t>) {
            return slot.size;
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
            return slot.int64;
        } else {
            return slot.int32;
        }
    }

    std::vector<Slot> slots_;
    std::size_t cursor_ = 0;
    std::uint64_t payloadBytes_ = 0;
};

} // namespace retape
