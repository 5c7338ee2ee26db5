#include "spiralx/corruptions.hpp"

#include <cmath>

#include "spiralx/rng.hpp"

namespace spiralx {

const char* corruption_kind_name(CorruptionKind k) {
    switch (k) {
        case CorruptionKind::Blur: return "blur";
        case CorruptionKind::Illumination: return "illumination";
        case CorruptionKind::Noise: return "noise";
        case CorruptionKind::Fog: return "fog";
    }
    return "unknown";
}

const char* intensity_level_name(IntensityLevel lvl) {
    switch (lvl) {
        case IntensityLevel::Low: return "low";
        case IntensityLevel::Mild: return "mild";
        case IntensityLevel::High: return "high";
        case IntensityLevel::Extreme: return "extreme";
    }
    return "unknown";
}

IntensityLevel parse_intensity_level(const std::string& name) {
    if (name == "low") return IntensityLevel::Low;
    if (name == "mild") return IntensityLevel::Mild;
    if (name == "high") return IntensityLevel::High;
    if (name == "extreme") return IntensityLevel::Extreme;
    throw DomainError("unknown intensity level '" + name + "'");
}

namespace {

/// Mirror index into [0, n), edge pixel included: -1 -> 0, n -> n-1.
int reflect(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - i - 1;
    }
    return i;
}

std::vector<float> gaussian_kernel(int k) {
    const double sigma = 0.3 * ((k - 1) * 0.5 - 1.0) + 0.8;
    const int anchor = k / 2;
    std::vector<float> w(k);
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
        const double d = i - anchor;
        w[i] = static_cast<float>(std::exp(-d * d / (2.0 * sigma * sigma)));
        sum += w[i];
    }
    for (auto& v : w) v = static_cast<float>(v / sum);
    return w;
}

} // namespace

Image gaussian_blur(const Image& img, int kernel_size) {
    if (kernel_size < 1)
        throw DomainError("gaussian_blur: kernel size must be >= 1");
    if (kernel_size > img.rows() || kernel_size > img.cols())
        throw DomainError("gaussian_blur: kernel " + std::to_string(kernel_size) +
                          " exceeds image " + std::to_string(img.rows()) + "x" +
                          std::to_string(img.cols()));
    if (kernel_size == 1) return img;

    const auto w = gaussian_kernel(kernel_size);
    const int anchor = kernel_size / 2;
    Image tmp(img.rows(), img.cols());
    Image out(img.rows(), img.cols());

    for (int ch = 0; ch < 3; ++ch) {
        for (int r = 0; r < img.rows(); ++r)
            for (int c = 0; c < img.cols(); ++c) {
                float acc = 0.0f;
                for (int i = 0; i < kernel_size; ++i)
                    acc += w[i] * img.at(ch, r, reflect(c + i - anchor, img.cols()));
                tmp.at(ch, r, c) = acc;
            }
        for (int r = 0; r < img.rows(); ++r)
            for (int c = 0; c < img.cols(); ++c) {
                float acc = 0.0f;
                for (int i = 0; i < kernel_size; ++i)
                    acc += w[i] * tmp.at(ch, reflect(r + i - anchor, img.rows()), c);
                out.at(ch, r, c) = clamp255(acc);
            }
    }
    return out;
}

Image illumination(const Image& img, float incandescence, float luminescence) {
    if (incandescence <= 0.0f || luminescence <= 0.0f)
        throw DomainError("illumination: factors must be positive");
    Image out(img.rows(), img.cols());
    for (std::size_t i = 0; i < img.flat().size(); ++i) {
        const float n = img.flat()[i] / 255.0f;
        out.flat()[i] = clamp255(255.0f * incandescence * std::pow(n, luminescence));
    }
    return out;
}

Image gaussian_noise(const Image& img, float mean, float std, std::uint32_t seed) {
    if (std < 0.0f) throw DomainError("gaussian_noise: std must be >= 0");
    Rng rng(seed);
    Image out(img.rows(), img.cols());
    for (std::size_t i = 0; i < img.flat().size(); ++i)
        out.flat()[i] = clamp255(
            img.flat()[i] + static_cast<float>(gaussian(rng, mean, std)));
    return out;
}

Image fog(const Image& img, float intensity) {
    if (!(intensity >= 0.0f && intensity <= 1.0f))
        throw DomainError("fog: intensity must be in [0,1]");
    Image out(img.rows(), img.cols());
    for (std::size_t i = 0; i < img.flat().size(); ++i)
        out.flat()[i] =
            clamp255((1.0f - intensity) * img.flat()[i] + intensity * 255.0f);
    return out;
}

Image apply_corruption(const Image& img, const CorruptionConfig& cfg) {
    switch (cfg.kind) {
        case CorruptionKind::Blur: return gaussian_blur(img, cfg.kernel_size);
        case CorruptionKind::Illumination:
            return illumination(img, cfg.incandescence, cfg.luminescence);
        case CorruptionKind::Noise:
            return gaussian_noise(img, cfg.noise_mean, cfg.noise_std, cfg.seed);
        case CorruptionKind::Fog: return fog(img, cfg.fog_intensity);
    }
    throw DomainError("apply_corruption: unknown kind");
}

std::vector<CorruptionConfig> condition_suite(IntensityLevel level) {
    std::vector<CorruptionConfig> suite;
    auto blur = [&](int k) {
        CorruptionConfig c;
        c.kind = CorruptionKind::Blur;
        c.level = level;
        c.kernel_size = k;
        suite.push_back(c);
    };
    auto illum = [&](float inc, float lum) {
        CorruptionConfig c;
        c.kind = CorruptionKind::Illumination;
        c.level = level;
        c.incandescence = inc;
        c.luminescence = lum;
        suite.push_back(c);
    };
    auto noise = [&](float mean, float std) {
        CorruptionConfig c;
        c.kind = CorruptionKind::Noise;
        c.level = level;
        c.noise_mean = mean;
        c.noise_std = std;
        suite.push_back(c);
    };
    auto fog_cfg = [&](float f) {
        CorruptionConfig c;
        c.kind = CorruptionKind::Fog;
        c.level = level;
        c.fog_intensity = f;
        suite.push_back(c);
    };

    switch (level) {
        case IntensityLevel::Low:
            blur(10); illum(0.9f, 0.6f); noise(2.0f, 4.0f); fog_cfg(0.3f);
            break;
        case IntensityLevel::Mild:
            blur(15); illum(1.1f, 0.6f); noise(2.0f, 8.0f); fog_cfg(0.6f);
            break;
        case IntensityLevel::High:
            blur(20); illum(1.3f, 0.6f); noise(2.0f, 12.0f); fog_cfg(0.9f);
            break;
        case IntensityLevel::Extreme:
            blur(40); noise(2.0f, 50.0f); fog_cfg(0.975f);
            break;
    }
    return suite;
}

} // namespace spiralx
