#include "spiralx/spiral.hpp"

namespace spiralx {

SpiralPermutation spiral_order(int rows, int cols) {
    if (rows < 1 || cols < 1)
        throw DomainError("spiral_order: dimensions must be >= 1, got " +
                          std::to_string(rows) + "x" + std::to_string(cols));
    SpiralPermutation perm;
    perm.rows = rows;
    perm.cols = cols;
    perm.order.reserve(static_cast<std::size_t>(rows) * cols);

    int top = 0, bottom = rows - 1, left = 0, right = cols - 1;
    while (top <= bottom && left <= right) {
        for (int k = left; k <= right; ++k)
            perm.order.push_back({top, k});
        for (int r = top + 1; r <= bottom; ++r)
            perm.order.push_back({r, right});
        if (top < bottom)
            for (int k = right - 1; k >= left; --k)
                perm.order.push_back({bottom, k});
        if (left < right)
            for (int r = bottom - 1; r > top; --r)
                perm.order.push_back({r, left});
        ++top; --bottom; ++left; --right;
    }
    return perm;
}

FeatureMap spiral_rearrange(const FeatureMap& f) {
    FeatureMap out(f.channels(), f.rows(), f.cols());
    const std::size_t plane = f.plane_size();
    for (int c = 0; c < f.channels(); ++c) {
        const float* in = f.data() + c * plane;
        float* dst = out.data() + c * plane;
        std::size_t write = 0;
        for_each_spiral_index(f.rows(), f.cols(),
                              [&](std::size_t src) { dst[write++] = in[src]; });
    }
    return out;
}

FeatureMap spiral_rearrange(const FeatureMap& f, const SpiralPermutation& perm) {
    if (perm.rows != f.rows() || perm.cols != f.cols())
        throw ShapeError("spiral_rearrange: permutation is " +
                         std::to_string(perm.rows) + "x" + std::to_string(perm.cols) +
                         " but map is " + f.shape_str());
    FeatureMap out(f.channels(), f.rows(), f.cols());
    const std::size_t plane = f.plane_size();
    for (int c = 0; c < f.channels(); ++c) {
        const float* in = f.data() + c * plane;
        float* dst = out.data() + c * plane;
        for (std::size_t j = 0; j < plane; ++j) dst[j] = in[perm.flat(j)];
    }
    return out;
}

FeatureMap spiral_fuse(const FeatureMap& sf, const FeatureMap& f, FuseMode mode) {
    if (!sf.same_shape(f))
        throw ShapeError("spiral_fuse: shapes differ, " + sf.shape_str() +
                         " vs " + f.shape_str());
    if (mode == FuseMode::Multiply) return elementwise_mul(sf, f);
    FeatureMap out(f.channels(), f.rows(), f.cols());
    for (std::size_t i = 0; i < f.size(); ++i)
        out.flat()[i] = sf.flat()[i] + f.flat()[i];
    return out;
}

FeatureMap spiral_pool(const FeatureMap& f, FuseMode mode) {
    return channel_concat(spiral_fuse(spiral_rearrange(f), f, mode), f);
}

FeatureMap spiral_pool_backward(const FeatureMap& f, const FeatureMap& upstream,
                                FuseMode mode) {
    if (upstream.channels() != 2 * f.channels() || !upstream.same_spatial(f))
        throw ShapeError("spiral_pool_backward: upstream must be 2Cx RxK for input " +
                         f.shape_str() + ", got " + upstream.shape_str());

    const std::size_t plane = f.plane_size();
    FeatureMap grad(f.channels(), f.rows(), f.cols());

    // Forward per channel: g[j] = f[p[j]] (*|+) f[j], y = concat(g, f).
    // d f[j] picks up three terms: the concat pass-through, the direct
    // factor of the fuse, and the term routed back through the permutation.
    std::vector<std::size_t> p(plane);
    {
        std::size_t j = 0;
        for_each_spiral_index(f.rows(), f.cols(),
                              [&](std::size_t src) { p[j++] = src; });
    }

    for (int c = 0; c < f.channels(); ++c) {
        const float* fin = f.data() + c * plane;
        const float* ug = upstream.data() + c * plane;
        const float* uf = upstream.data() + (static_cast<std::size_t>(f.channels()) + c) * plane;
        float* g = grad.data() + c * plane;
        for (std::size_t j = 0; j < plane; ++j) g[j] = uf[j];
        if (mode == FuseMode::Multiply) {
            for (std::size_t j = 0; j < plane; ++j) {
                g[j] += ug[j] * fin[p[j]];
                g[p[j]] += ug[j] * fin[j];
            }
        } else {
            for (std::size_t j = 0; j < plane; ++j) {
                g[j] += ug[j];
                g[p[j]] += ug[j];
            }
        }
    }
    return grad;
}

} // namespace spiralx
