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

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <memory>
#include <type_traits>
#include <vector>

#include "retape/types.hpp"

namespace retape {

// Tracks the bytes held by a tape's data buffers: statement/argument chunks,
// the adjoint and primal value vectors, and committed external-function
// entries. The high watermark is the maximum concurrent total ever seen and
// survives tape resets. Counts are driven by the library's own allocation
// events, so they are deterministic across platforms; transient scratch
// buffers used during a reverse sweep are not tracked.
class MemoryTracker {
public:
    void allocate(std::uint64_t bytes) {
        current_ += bytes;
        if (current_ > peak_) {
            peak_ = current_;
        }
    }

    void release(std::uint64_t bytes) {
        assert(bytes <= current_);
        current_ -= bytes;
    }

    std::uint64_t currentBytes() const { return current_; }
    std::uint64_t peakBytes() const { return peak_; }

private:
    std::uint64_t current_ = 0;
    std::uint64_t peak_ = 0;
};

// Append-only array of fixed-size records stored in chunks of roughly 2 MiB.
// A chunk holds a whole number of records, so any record can be addressed in
// O(1) and records never straddle a chunk boundary. Chunks are allocated
// lazily on first append and freed on clear(); every allocation is reported
// to the owning tape's MemoryTracker.
class ChunkedArray {
public:
    static constexpr std::size_t targetChunkBytes = std::size_t(2) * 1024 * 1024;

    ChunkedArray(std::size_t recordSize, MemoryTracker& tracker)
        : recordSize_(recordSize),
          recordsPerChunk_(targetChunkBytes / recordSize > 0 ? targetChunkBytes / recordSize : 1),
          tracker_(&tracker) {
        assert(recordSize_ > 0);
    }

    ChunkedArray(const ChunkedArray&) = delete;
    ChunkedArray& operator=(const ChunkedArray&) = delete;

    ~ChunkedArray() { clear(); }

    std::size_t size() const { return size_; }
    std::size_t recordSize() const { return recordSize_; }

    void append(const void* record) {
        const std::size_t chunk = size_ / recordsPerChunk_;
        if (chunk == chunks_.size()) {
            grow();
        }
        std::memcpy(chunks_[chunk].get() + (size_ % recordsPerChunk_) * recordSize_, record,
                    recordSize_);
        ++size_;
    }

    void read(std::size_t index, void* out) const {
        assert(index < size_);
        std::memcpy(out, slot(index), recordSize_);
    }

    void write(std::size_t index, const void* record) {
        assert(index < size_);
        std::memcpy(const_cast<std::byte*>(slot(index)), record, recordSize_);
    }

    // Typed convenience for streams whose record is a single POD value.
    template <typename T>
    T get(std::size_t index) const {
        static_assert(std::is_trivially_copyable_v<T>);
        assert(sizeof(T) == recordSize_);
        T value;
        read(index, &value);
        return value;
    }

    template <typename T>
    void push(const T& value) {
        static_assert(std::is_trivially_copyable_v<T>);
        assert(sizeof(T) == recordSize_);
        append(&value);
    }

    void clear() {
        tracker_->release(chunks_.size() * chunkBytes());
        chunks_.clear();
        size_ = 0;
    }

private:
    std::size_t chunkBytes() const { return recordsPerChunk_ * recordSize_; }

    const std::byte* slot(std::size_t index) const {
        return chunks_[index / recordsPerChunk_].get() + (index % recordsPerChunk_) * recordSize_;
    }

    void grow() {
        chunks_.push_back(std::make_unique<std::byte[]>(chunkBytes()));
        tracker_->allocate(chunkBytes());
    }

    std::size_t recordSize_;
    std::size_t recordsPerChunk_;
    MemoryTracker* tracker_;
    std::vector<std::unique_ptr<std::byte[]>> chunks_;
    std::size_t size_ = 0;
};

// Dense vector of doubles (adjoint and primal value vectors) whose growth is
// reported to the MemoryTracker. Capacity doubles; while regrowing, the old
// and new buffers briefly coexist and both count toward the watermark, which
// is what the growth actually costs at runtime.
class TrackedDoubleVector {
public:
    explicit TrackedDoubleVector(MemoryTracker& tracker) : tracker_(&tracker) {}

    TrackedDoubleVector(const TrackedDoubleVector&) = delete;
    TrackedDoubleVector& operator=(const TrackedDoubleVector&) = delete;

    ~TrackedDoubleVector() { clear(); }

    std::size_t size() const { return data_.size(); }

    // Grows to at least n elements; new elements are zero. Never shrinks.
    void ensureSize(std::size_t n) {
        if (n <= data_.size()) {
            return;
        }
        if (n > capacity_) {
            std::size_t newCapacity = capacity_ == 0 ? 16 : capacity_ * 2;
            if (newCapacity < n) {
                newCapacity = n;
            }
            tracker_->allocate(newCapacity * sizeof(double));
            data_.reserve(newCapacity);
            tracker_->release(capacity_ * sizeof(double));
            capacity_ = newCapacity;
        }
        data_.resize(n, 0.0);
    }

    double& operator[](std::size_t index) { return data_[index]; }
    double operator[](std::size_t index) const { return data_[index]; }
    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    void zeroAll() { data_.assign(data_.size(), 0.0); }

    void clear() {
        tracker_->release(capacity_ * sizeof(double));
        capacity_ = 0;
        data_.clear();
        data_.shrink_to_fit();
    }

private:
    MemoryTracker* tracker_;
    std::vector<double> data_;
    std::size_t capacity_ = 0;
};

} // namespace retape
