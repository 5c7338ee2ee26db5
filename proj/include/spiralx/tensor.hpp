#ifndef SPIRALX_TENSOR_HPP
#define SPIRALX_TENSOR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace spiralx {

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Dense rank-3 grid of 32-bit reals, row-major with the channel axis
/// outermost: offset(c, r, k) = c*rows*cols + r*cols + k.
class FeatureMap {
public:
    FeatureMap() = default;

    FeatureMap(int channels, int rows, int cols, float fill = 0.0f)
        : channels_(channels), rows_(rows), cols_(cols),
          data_(static_cast<std::size_t>(channels) * rows * cols, fill) {
        if (channels < 0 || rows < 0 || cols < 0)
            throw DomainError("FeatureMap: negative dimension");
    }

    static FeatureMap from_data(int channels, int rows, int cols,
                                std::vector<float> data);

    int channels() const { return channels_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    std::size_t plane_size() const {
        return static_cast<std::size_t>(rows_) * cols_;
    }

    float& at(int c, int r, int k) { return data_[offset(c, r, k)]; }
    float at(int c, int r, int k) const { return data_[offset(c, r, k)]; }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }
    std::vector<float>& flat() { return data_; }
    const std::vector<float>& flat() const { return data_; }

    bool same_shape(const FeatureMap& o) const {
        return channels_ == o.channels_ && rows_ == o.rows_ && cols_ == o.cols_;
    }
    bool same_spatial(const FeatureMap& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_;
    }

    std::string shape_str() const;
    bool all_finite() const;

private:
    std::size_t offset(int c, int r, int k) const {
        return (static_cast<std::size_t>(c) * rows_ + r) * cols_ + k;
    }

    int channels_ = 0;
    int rows_ = 0;
    int cols_ = 0;
    std::vector<float> data_;
};

/// 8-bit-range RGB image held as 32-bit reals for transform precision.
/// Planes are stored R, G, B; every transform in the library clamps its
/// output back into [0, 255].
class Image {
public:
    static constexpr int kChannels = 3;

    Image() = default;
    Image(int rows, int cols, float fill = 0.0f)
        : rows_(rows), cols_(cols),
          px_(static_cast<std::size_t>(kChannels) * rows * cols, fill) {
        if (rows < 0 || cols < 0) throw DomainError("Image: negative dimension");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t plane_size() const {
        return static_cast<std::size_t>(rows_) * cols_;
    }

    float& at(int ch, int r, int c) { return px_[offset(ch, r, c)]; }
    float at(int ch, int r, int c) const { return px_[offset(ch, r, c)]; }

    std::vector<float>& flat() { return px_; }
    const std::vector<float>& flat() const { return px_; }

    bool same_shape(const Image& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_;
    }

    /// Clamp every pixel into [0, 255] in place.
    void clamp();

private:
    std::size_t offset(int ch, int r, int c) const {
        return (static_cast<std::size_t>(ch) * rows_ + r) * cols_ + c;
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<float> px_;
};

inline float clamp01(float v) { return v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v); }
inline float clamp255(float v) { return v < 0.0f ? 0.0f : (v > 255.0f ? 255.0f : v); }

/// Rec.601 luma weights, used wherever a scalar intensity is needed.
inline float luma(float r, float g, float b) {
    return 0.299f * r + 0.587f * g + 0.114f * b;
}

/// Stack b's channels after a's. Spatial shapes must agree.
FeatureMap channel_concat(const FeatureMap& a, const FeatureMap& b);

/// Hadamard product; shapes must be identical.
FeatureMap elementwise_mul(const FeatureMap& a, const FeatureMap& b);

} // namespace spiralx

#endif
