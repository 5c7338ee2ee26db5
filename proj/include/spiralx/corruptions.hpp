#ifndef SPIRALX_CORRUPTIONS_HPP
#define SPIRALX_CORRUPTIONS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "spiralx/tensor.hpp"

namespace spiralx {

enum class CorruptionKind { Blur, Illumination, Noise, Fog };

const char* corruption_kind_name(CorruptionKind k);

enum class IntensityLevel { Low, Mild, High, Extreme };

const char* intensity_level_name(IntensityLevel lvl);
IntensityLevel parse_intensity_level(const std::string& name);

struct CorruptionConfig {
    CorruptionKind kind = CorruptionKind::Blur;
    IntensityLevel level = IntensityLevel::Low;
    int kernel_size = 0;          // blur
    float incandescence = 0.0f;   // illumination
    float luminescence = 0.0f;    // illumination
    float noise_mean = 0.0f;      // noise
    float noise_std = 0.0f;       // noise
    float fog_intensity = 0.0f;   // fog
    std::uint32_t seed = 0;
};

/// Separable Gaussian blur, sigma = 0.3*((k-1)*0.5 - 1) + 0.8. Even kernels
/// anchor at index k/2; edges reflect (mirror including the edge pixel).
Image gaussian_blur(const Image& img, int kernel_size);

/// out = clip(255 * incandescence * (in/255)^luminescence).
Image illumination(const Image& img, float incandescence, float luminescence);

/// Per-channel additive Gaussian noise, clipped. Reproducible per seed.
Image gaussian_noise(const Image& img, float mean, float std, std::uint32_t seed);

/// Uniform white veil: out = (1-f)*in + f*255.
Image fog(const Image& img, float intensity);

Image apply_corruption(const Image& img, const CorruptionConfig& cfg);

/// The parameter grid of the named intensity row: blur, illumination, noise
/// and fog configs for low/mild/high; the extreme row has no illumination
/// entry. Seeds are left 0 for the caller to fill.
std::vector<CorruptionConfig> condition_suite(IntensityLevel level);

} // namespace spiralx

#endif
