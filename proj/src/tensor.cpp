#include "spiralx/tensor.hpp"

#include <cmath>
#include <cstring>

namespace spiralx {

FeatureMap FeatureMap::from_data(int channels, int rows, int cols,
                                 std::vector<float> data) {
    FeatureMap f;
    const std::size_t want =
        static_cast<std::size_t>(channels) * rows * cols;
    if (channels < 0 || rows < 0 || cols < 0)
        throw DomainError("FeatureMap: negative dimension");
    if (data.size() != want)
        throw ShapeError("FeatureMap: data length " + std::to_string(data.size()) +
                         " does not match " + std::to_string(channels) + "x" +
                         std::to_string(rows) + "x" + std::to_string(cols));
    f.channels_ = channels;
    f.rows_ = rows;
    f.cols_ = cols;
    f.data_ = std::move(data);
    return f;
}

std::string FeatureMap::shape_str() const {
    return std::to_string(channels_) + "x" + std::to_string(rows_) + "x" +
           std::to_string(cols_);
}

bool FeatureMap::all_finite() const {
    for (float v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

void Image::clamp() {
    for (float& v : px_) v = clamp255(v);
}

FeatureMap channel_concat(const FeatureMap& a, const FeatureMap& b) {
    if (!a.same_spatial(b))
        throw ShapeError("channel_concat: spatial shapes differ, " +
                         a.shape_str() + " vs " + b.shape_str());
    FeatureMap out(a.channels() + b.channels(), a.rows(), a.cols());
    std::memcpy(out.data(), a.data(), a.size() * sizeof(float));
    std::memcpy(out.data() + a.size(), b.data(), b.size() * sizeof(float));
    return out;
}

FeatureMap elementwise_mul(const FeatureMap& a, const FeatureMap& b) {
    if (!a.same_shape(b))
        throw ShapeError("elementwise_mul: shapes differ, " + a.shape_str() +
                         " vs " + b.shape_str());
    FeatureMap out(a.channels(), a.rows(), a.cols());
    const float* pa = a.data();
    const float* pb = b.data();
    float* po = out.data();
    for (std::size_t i = 0; i < a.size(); ++i) po[i] = pa[i] * pb[i];
    return out;
}

} // namespace spiralx
