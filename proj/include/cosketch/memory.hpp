#pragma once

// Per-thread accounting of working memory held by library containers.
//
// Every DenseMatrix, SparseMatrix and column buffer allocates through
// TrackingAllocator, so the ledger sees the live byte count of all sketch
// state, buffers and temporaries created on the current thread. Sizes are
// reported in "scalars" (8-byte words) to line up with O(m*l) space claims.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <new>
#include <vector>

namespace cosketch::memory {

struct Ledger {
    std::int64_t current_bytes = 0;
    std::int64_t peak_bytes = 0;
};

Ledger& thread_ledger() noexcept;

inline void record_alloc(std::size_t bytes) noexcept {
    auto& l = thread_ledger();
    l.current_bytes += static_cast<std::int64_t>(bytes);
    l.peak_bytes = std::max(l.peak_bytes, l.current_bytes);
}

inline void record_free(std::size_t bytes) noexcept {
    thread_ledger().current_bytes -= static_cast<std::int64_t>(bytes);
}

template <class T>
struct TrackingAllocator {
    using value_type = T;

    TrackingAllocator() noexcept = default;
    template <class U>
    TrackingAllocator(const TrackingAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) {
        T* p = static_cast<T*>(::operator new(n * sizeof(T)));
        record_alloc(n * sizeof(T));
        return p;
    }
    void deallocate(T* p, std::size_t n) noexcept {
        record_free(n * sizeof(T));
        ::operator delete(p);
    }

    template <class U>
    bool operator==(const TrackingAllocator<U>&) const noexcept { return true; }
};

template <class T>
using tracked_vector = std::vector<T, TrackingAllocator<T>>;

// Measures the peak of tracked memory above the level at construction.
class PeakScope {
public:
    PeakScope() noexcept;
    ~PeakScope();
    PeakScope(const PeakScope&) = delete;
    PeakScope& operator=(const PeakScope&) = delete;

    // Peak tracked bytes above the baseline, in 8-byte scalars (rounded up).
    std::int64_t peak_scalars() const noexcept;

private:
    std::int64_t baseline_;
    std::int64_t outer_peak_;
};

}  // namespace cosketch::memory
