#ifndef SPIRALX_SPIRAL_HPP
#define SPIRALX_SPIRAL_HPP

#include <cstdint>
#include <vector>

#include "spiralx/tensor.hpp"

namespace spiralx {

/// How the spiraled map is fused with the pooled map. Multiply is the
/// default; Add is exposed for ablation runs.
enum class FuseMode { Multiply, Add };

/// Clockwise spiral traversal of a rows x cols grid, starting at (0,0):
/// top row left-to-right, right column downward, bottom row right-to-left,
/// left column upward, then inward layer by layer. order[j] is the j-th
/// cell visited; it is a bijection on the grid.
struct SpiralPermutation {
    struct Idx {
        std::int32_t row;
        std::int32_t col;
        bool operator==(const Idx&) const = default;
    };

    int rows = 0;
    int cols = 0;
    std::vector<Idx> order;

    std::size_t size() const { return order.size(); }
    std::size_t flat(std::size_t j) const {
        return static_cast<std::size_t>(order[j].row) * cols + order[j].col;
    }
};

/// Builds the spiral permutation. O(rows*cols) time; auxiliary space beyond
/// the returned order vector is constant (a handful of boundary counters),
/// comfortably inside the O(cols) budget.
SpiralPermutation spiral_order(int rows, int cols);

/// Streams the spiral traversal without materializing the permutation.
/// Visit receives the flat row-major index of each cell in spiral order.
template <typename Visit>
void for_each_spiral_index(int rows, int cols, Visit&& visit) {
    if (rows < 1 || cols < 1)
        throw DomainError("spiral traversal: dimensions must be >= 1");
    int top = 0, bottom = rows - 1, left = 0, right = cols - 1;
    const auto flat = [cols](int r, int c) {
        return static_cast<std::size_t>(r) * cols + c;
    };
    while (top <= bottom && left <= right) {
        for (int k = left; k <= right; ++k) visit(flat(top, k));
        for (int r = top + 1; r <= bottom; ++r) visit(flat(r, right));
        if (top < bottom)
            for (int k = right - 1; k >= left; --k) visit(flat(bottom, k));
        if (left < right)
            for (int r = bottom - 1; r > top; --r) visit(flat(r, left));
        ++top; --bottom; ++left; --right;
    }
}

/// Per channel: read the map in spiral order and write the sequence back in
/// row-major order. Output shape equals input shape.
FeatureMap spiral_rearrange(const FeatureMap& f);
FeatureMap spiral_rearrange(const FeatureMap& f, const SpiralPermutation& perm);

/// Fuses the spiraled map with the pooled map it came from.
FeatureMap spiral_fuse(const FeatureMap& sf, const FeatureMap& f,
                       FuseMode mode = FuseMode::Multiply);

/// Full spiral pooling: concat(fuse(rearrange(f), f), f). Channels double;
/// the upper channel block [C..2C) is the input passed through untouched.
FeatureMap spiral_pool(const FeatureMap& f, FuseMode mode = FuseMode::Multiply);

/// Exact gradient of spiral_pool with respect to its input. upstream must
/// have shape 2C x R x K for a C x R x K input.
FeatureMap spiral_pool_backward(const FeatureMap& f, const FeatureMap& upstream,
                                FuseMode mode = FuseMode::Multiply);

} // namespace spiralx

#endif
