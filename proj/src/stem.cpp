#include "spiralx/stem.hpp"

#include <cmath>

namespace spiralx {

namespace {

/// Hue in degrees at full saturation/value -> RGB in [0,1].
Rgb hue_to_rgb(float hue_deg) {
    float h = std::fmod(hue_deg, 360.0f);
    if (h < 0.0f) h += 360.0f;
    const float x = 1.0f - std::fabs(std::fmod(h / 60.0f, 2.0f) - 1.0f);
    switch (static_cast<int>(h / 60.0f)) {
        case 0: return {1.0f, x, 0.0f};
        case 1: return {x, 1.0f, 0.0f};
        case 2: return {0.0f, 1.0f, x};
        case 3: return {0.0f, x, 1.0f};
        case 4: return {x, 0.0f, 1.0f};
        default: return {1.0f, 0.0f, x};
    }
}

struct Hsv {
    float h; // degrees in [0, 360)
    float s;
    float v;
};

Hsv rgb_to_hsv(float r, float g, float b) {
    const float mx = std::max(r, std::max(g, b));
    const float mn = std::min(r, std::min(g, b));
    const float d = mx - mn;
    Hsv out{0.0f, 0.0f, mx};
    if (d > 0.0f) {
        if (mx == r)
            out.h = 60.0f * std::fmod((g - b) / d + 6.0f, 6.0f);
        else if (mx == g)
            out.h = 60.0f * ((b - r) / d + 2.0f);
        else
            out.h = 60.0f * ((r - g) / d + 4.0f);
    }
    if (mx > 0.0f) out.s = d / mx;
    return out;
}

void hsv_to_rgb(const Hsv& in, float& r, float& g, float& b) {
    const float c = in.v * in.s;
    const float x = c * (1.0f - std::fabs(std::fmod(in.h / 60.0f, 2.0f) - 1.0f));
    const float m = in.v - c;
    float rr = 0, gg = 0, bb = 0;
    switch (static_cast<int>(in.h / 60.0f) % 6) {
        case 0: rr = c; gg = x; break;
        case 1: rr = x; gg = c; break;
        case 2: gg = c; bb = x; break;
        case 3: gg = x; bb = c; break;
        case 4: rr = x; bb = c; break;
        default: rr = c; bb = x; break;
    }
    r = rr + m;
    g = gg + m;
    b = bb + m;
}

} // namespace

PredictionTuples clamp_predictions(const std::array<float, 7>& raw) {
    for (float v : raw)
        if (std::isnan(v)) throw DomainError("clamp_predictions: NaN prediction");
    PredictionTuples out;
    long id = std::lroundf(raw[0]);
    if (id < 1) id = 1;
    if (id > 4) id = 4;
    out.colormap_id = static_cast<ColormapId>(id);
    out.alpha = clamp01(raw[1]);
    out.brightness = clamp01(raw[2]);
    out.contrast = clamp01(raw[3]);
    out.gamma = clamp01(raw[4]);
    out.saturation = clamp01(raw[5]);
    out.hue_shift = clamp01(raw[6]);
    return out;
}

Rgb colormap_lookup(ColormapId id, float t) {
    if (!(t >= 0.0f && t <= 1.0f))
        throw DomainError("colormap_lookup: t must be in [0,1]");
    switch (id) {
        case ColormapId::Jet:
            return {clamp01(1.5f - std::fabs(4.0f * t - 3.0f)),
                    clamp01(1.5f - std::fabs(4.0f * t - 2.0f)),
                    clamp01(1.5f - std::fabs(4.0f * t - 1.0f))};
        case ColormapId::Hsv:
            return hue_to_rgb(300.0f * t);
        case ColormapId::Rainbow:
            return hue_to_rgb(240.0f * (1.0f - t));
        case ColormapId::Turbo: {
            const float x = t * 255.0f;
            const int i0 = static_cast<int>(x) < 255 ? static_cast<int>(x) : 254;
            const float w = x - static_cast<float>(i0);
            const float* a = kTurboTable[i0];
            const float* b = kTurboTable[i0 + 1];
            return {a[0] + w * (b[0] - a[0]), a[1] + w * (b[1] - a[1]),
                    a[2] + w * (b[2] - a[2])};
        }
    }
    throw DomainError("colormap_lookup: unknown colormap id");
}

Image thermal_overlay(const Image& img, const PredictionTuples& t_e) {
    if (t_e.alpha == 0.0f) return img;
    Image out(img.rows(), img.cols());
    const float a = t_e.alpha;
    for (int r = 0; r < img.rows(); ++r) {
        for (int c = 0; c < img.cols(); ++c) {
            const float y =
                luma(img.at(0, r, c), img.at(1, r, c), img.at(2, r, c)) / 255.0f;
            const Rgb m = colormap_lookup(t_e.colormap_id, clamp01(y));
            out.at(0, r, c) = clamp255(a * (m.r * 255.0f) + (1.0f - a) * img.at(0, r, c));
            out.at(1, r, c) = clamp255(a * (m.g * 255.0f) + (1.0f - a) * img.at(1, r, c));
            out.at(2, r, c) = clamp255(a * (m.b * 255.0f) + (1.0f - a) * img.at(2, r, c));
        }
    }
    return out;
}

Image dark_theme_overlay(const Image& img, const PredictionTuples& d_t) {
    Image out(img.rows(), img.cols());
    const float bright_gain = 0.2f + 0.8f * d_t.brightness;
    const float contrast_gain = 0.5f + 0.5f * d_t.contrast;
    const float gamma_exp = std::exp2(2.0f * d_t.gamma - 1.0f);
    float hue_deg = std::fmod(d_t.hue_shift * 360.0f, 360.0f);

    for (int r = 0; r < img.rows(); ++r) {
        for (int c = 0; c < img.cols(); ++c) {
            float p[3];
            for (int ch = 0; ch < 3; ++ch) p[ch] = img.at(ch, r, c) / 255.0f;

            if (d_t.brightness != 1.0f)
                for (float& v : p) v *= bright_gain;
            if (d_t.contrast != 1.0f)
                for (float& v : p) v = clamp01((v - 0.5f) * contrast_gain + 0.5f);
            if (d_t.gamma != 0.5f)
                for (float& v : p) v = std::pow(v, gamma_exp);
            if (d_t.saturation != 1.0f) {
                const float y = luma(p[0], p[1], p[2]);
                for (float& v : p) v = y + d_t.saturation * (v - y);
            }
            if (hue_deg != 0.0f) {
                Hsv hsv = rgb_to_hsv(clamp01(p[0]), clamp01(p[1]), clamp01(p[2]));
                hsv.h = std::fmod(hsv.h + hue_deg, 360.0f);
                hsv_to_rgb(hsv, p[0], p[1], p[2]);
            }

            for (int ch = 0; ch < 3; ++ch)
                out.at(ch, r, c) = clamp255(p[ch] * 255.0f);
        }
    }
    return out;
}

namespace {

void copy_image_scaled(const Image& img, FeatureMap& dst, int channel_base) {
    const std::size_t plane = img.plane_size();
    for (int ch = 0; ch < 3; ++ch) {
        float* out = dst.data() + (channel_base + ch) * plane;
        const float* in = img.flat().data() + ch * plane;
        for (std::size_t i = 0; i < plane; ++i) out[i] = in[i] / 255.0f;
    }
}

} // namespace

ModalityStack build_modality_stack(const Image& img, const PredictionTuples& preds) {
    ModalityStack s;
    s.tl = thermal_overlay(img, preds);
    s.dt = dark_theme_overlay(img, preds);
    s.rgb = img;
    s.stacked = FeatureMap(9, img.rows(), img.cols());
    copy_image_scaled(s.tl, s.stacked, 0);
    copy_image_scaled(s.dt, s.stacked, 3);
    copy_image_scaled(s.rgb, s.stacked, 6);
    return s;
}

FeatureMap rgb_stack(const Image& img) {
    FeatureMap f(3, img.rows(), img.cols());
    copy_image_scaled(img, f, 0);
    return f;
}

} // namespace spiralx
