#include "cosketch/memory.hpp"

namespace cosketch::memory {

Ledger& thread_ledger() noexcept {
    thread_local Ledger ledger;
    return ledger;
}

PeakScope::PeakScope() noexcept {
    auto& l = thread_ledger();
    baseline_ = l.current_bytes;
    outer_peak_ = l.peak_bytes;
    l.peak_bytes = l.current_bytes;
}

PeakScope::~PeakScope() {
    auto& l = thread_ledger();
    l.peak_bytes = std::max(l.peak_bytes, outer_peak_);
}

std::int64_t PeakScope::peak_scalars() const noexcept {
    const auto bytes = thread_ledger().peak_bytes - baseline_;
    return bytes <= 0 ? 0 : (bytes + 7) / 8;
}

}  // namespace cosketch::memory
