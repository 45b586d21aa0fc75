#pragma once

#include <cstddef>
#include <cstdint>
#include <queue>
#include <vector>

#include "cosketch/cod.hpp"
#include "cosketch/rng.hpp"
#include "cosketch/sparse.hpp"

namespace cosketch {

// Frequent directions on the stacked stream [X_i; Y_i].
class FdAmmSketcher {
public:
    FdAmmSketcher(std::size_t m_x, std::size_t m_y, std::size_t l);

    void update(SparseColumnView x, SparseColumnView y);
    SketchPair finalize() const;

    std::size_t shrink_count() const noexcept { return shrinks_; }

private:
    void shrink();

    std::size_t m_x_, m_y_, l_;
    DenseMatrix b_;  // (m_x + m_y) x l
    std::size_t cursor_ = 0;
    std::size_t shrinks_ = 0;
};

// Column selection: l independent single-slot weighted reservoirs with
// weights ||X_i|| ||Y_i|| (sampling with replacement), each advanced with
// exponential jumps. Rescaled by sqrt(W / (l w_i)) at finalize.
class CsSketcher {
public:
    CsSketcher(std::size_t m_x, std::size_t m_y, std::size_t l, std::uint64_t seed);

    void update(SparseColumnView x, SparseColumnView y);
    SketchPair finalize() const;

    double total_weight() const noexcept { return total_; }

private:
    struct Slot {
        double log_key = 0.0;  // log of the reservoir key u^(1/w)
        double weight = 0.0;   // weight of the held column (0 = empty)
        double next = 0.0;     // cumulative weight at which the slot is replaced
    };
    struct Pending {
        double next;
        std::size_t slot;
        bool operator>(const Pending& o) const noexcept {
            return next > o.next || (next == o.next && slot > o.slot);
        }
    };

    void place(std::size_t slot, SparseColumnView x, SparseColumnView y);
    void schedule(std::size_t slot);

    std::size_t m_x_, m_y_, l_;
    Rng rng_;
    DenseMatrix b_x_, b_y_;
    std::vector<Slot> slots_;
    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue_;
    double total_ = 0.0;
};

// Gaussian random projection B = [X; Y] G / sqrt(l). Row i of G is drawn on
// arrival of column i from a counter-keyed sub-stream.
class RpSketcher {
public:
    RpSketcher(std::size_t m_x, std::size_t m_y, std::size_t l, std::uint64_t seed);

    void update(SparseColumnView x, SparseColumnView y);
    SketchPair finalize() const;

private:
    std::size_t l_;
    Rng base_;
    std::uint64_t index_ = 0;
    std::vector<double> g_;
    SketchPair sketch_;
};

SketchPair fd_amm_sketch(const SparseMatrix& x, const SparseMatrix& y, std::size_t l);
SketchPair cs_sketch(const SparseMatrix& x, const SparseMatrix& y, std::size_t l,
                     std::uint64_t seed);
SketchPair rp_sketch(const SparseMatrix& x, const SparseMatrix& y, std::size_t l,
                     std::uint64_t seed);

}  // namespace cosketch
