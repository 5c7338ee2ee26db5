#ifndef SPIRALX_STEM_HPP
#define SPIRALX_STEM_HPP

#include <array>

#include "spiralx/tensor.hpp"

namespace spiralx {

enum class ColormapId : int { Jet = 1, Rainbow = 2, Hsv = 3, Turbo = 4 };

extern const float kTurboTable[256][3];

/// The clamped prediction tuples driving the stem block: T_e = (colormap,
/// alpha) selects and blends the thermal-like overlay, D_t = (brightness,
/// contrast, gamma, saturation, hue_shift) shapes the dark-theme overlay.
struct PredictionTuples {
    ColormapId colormap_id = ColormapId::Jet;
    float alpha = 0.0f;
    float brightness = 1.0f;
    float contrast = 1.0f;
    float gamma = 0.5f;
    float saturation = 1.0f;
    float hue_shift = 0.0f;

    /// The parameter vector that leaves the input image untouched.
    static PredictionTuples identity() {
        return {ColormapId::Jet, 0.0f, 1.0f, 1.0f, 0.5f, 1.0f, 0.0f};
    }

    std::array<float, 7> as_array() const {
        return {static_cast<float>(colormap_id), alpha, brightness,
                contrast, gamma, saturation, hue_shift};
    }
};

/// Raw regressor outputs -> valid tuples. The colormap value is rounded to
/// the nearest integer and clamped to [1,4]; the six remaining values are
/// clamped to [0,1]. NaN anywhere is a domain error.
PredictionTuples clamp_predictions(const std::array<float, 7>& raw);

struct Rgb {
    float r, g, b;
};

/// Colormap sample for t in [0,1], each channel in [0,1].
/// JET, RAINBOW and HSV are analytic; TURBO interpolates the embedded table.
Rgb colormap_lookup(ColormapId id, float t);

/// Blends the colormapped luma over the input: out = alpha*map + (1-alpha)*in.
/// alpha = 0 returns the input bit-exactly.
Image thermal_overlay(const Image& img, const PredictionTuples& t_e);

/// Brightness, contrast, gamma, saturation and hue shift applied in that
/// fixed order on [0,1]-normalized pixels. Each stage is skipped at its
/// identity parameter so the identity tuple reproduces the input bit-exactly.
Image dark_theme_overlay(const Image& img, const PredictionTuples& d_t);

/// The three-modality bundle fed to the detector.
struct ModalityStack {
    Image tl;
    Image dt;
    Image rgb;
    FeatureMap stacked; // 9 channels: TL, DT, RGB, each scaled to [0,1]
};

ModalityStack build_modality_stack(const Image& img, const PredictionTuples& preds);

/// RGB-only 3-channel stack in [0,1] for stem-ablated runs.
FeatureMap rgb_stack(const Image& img);

} // namespace spiralx

#endif
