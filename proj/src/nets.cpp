#include "spiralx/nets.hpp"

#include <algorithm>
#include <cmath>

#include "spiralx/rng.hpp"

namespace spiralx {

// ---------------------------------------------------------------------------
// Primitive layers
// ---------------------------------------------------------------------------

void ConvLayer::init_he(std::uint32_t seed) {
    Rng rng(seed);
    const std::size_t n = static_cast<std::size_t>(out_ch) * in_ch * k * k;
    w.resize(n);
    const double scale = std::sqrt(2.0 / (static_cast<double>(in_ch) * k * k));
    for (auto& v : w) v = static_cast<float>(gaussian(rng) * scale);
    b.assign(out_ch, 0.0f);
}

FeatureMap conv_forward(const ConvLayer& layer, const FeatureMap& x) {
    if (x.channels() != layer.in_ch)
        throw ShapeError("conv_forward: input has " + std::to_string(x.channels()) +
                         " channels, layer expects " + std::to_string(layer.in_ch));
    const int out_r = layer.out_size(x.rows());
    const int out_c = layer.out_size(x.cols());
    if (out_r < 1 || out_c < 1)
        throw ShapeError("conv_forward: kernel does not fit input " + x.shape_str());
    FeatureMap y(layer.out_ch, out_r, out_c);

    const int K = layer.k, S = layer.stride, P = layer.pad;
    for (int oc = 0; oc < layer.out_ch; ++oc) {
        const float* woc =
            layer.w.data() + static_cast<std::size_t>(oc) * layer.in_ch * K * K;
        for (int orow = 0; orow < out_r; ++orow) {
            for (int ocol = 0; ocol < out_c; ++ocol) {
                float acc = layer.b[oc];
                for (int ic = 0; ic < layer.in_ch; ++ic) {
                    const float* wk = woc + static_cast<std::size_t>(ic) * K * K;
                    for (int kr = 0; kr < K; ++kr) {
                        const int ir = orow * S + kr - P;
                        if (ir < 0 || ir >= x.rows()) continue;
                        for (int kc = 0; kc < K; ++kc) {
                            const int icc = ocol * S + kc - P;
                            if (icc < 0 || icc >= x.cols()) continue;
                            acc += wk[kr * K + kc] * x.at(ic, ir, icc);
                        }
                    }
                }
                y.at(oc, orow, ocol) = acc;
            }
        }
    }
    return y;
}

FeatureMap conv_backward(const ConvLayer& layer, const FeatureMap& x,
                         const FeatureMap& upstream, ConvGrads& g) {
    const int out_r = layer.out_size(x.rows());
    const int out_c = layer.out_size(x.cols());
    if (upstream.channels() != layer.out_ch || upstream.rows() != out_r ||
        upstream.cols() != out_c)
        throw ShapeError("conv_backward: upstream shape " + upstream.shape_str() +
                         " does not match output of conv over " + x.shape_str());
    if (g.w.size() != layer.w.size()) g.w.assign(layer.w.size(), 0.0f);
    if (g.b.size() != layer.b.size()) g.b.assign(layer.b.size(), 0.0f);

    FeatureMap dx(x.channels(), x.rows(), x.cols());
    const int K = layer.k, S = layer.stride, P = layer.pad;
    for (int oc = 0; oc < layer.out_ch; ++oc) {
        const float* woc =
            layer.w.data() + static_cast<std::size_t>(oc) * layer.in_ch * K * K;
        float* gwoc = g.w.data() + static_cast<std::size_t>(oc) * layer.in_ch * K * K;
        for (int orow = 0; orow < out_r; ++orow) {
            for (int ocol = 0; ocol < out_c; ++ocol) {
                const float up = upstream.at(oc, orow, ocol);
                if (up == 0.0f) continue;
                g.b[oc] += up;
                for (int ic = 0; ic < layer.in_ch; ++ic) {
                    const float* wk = woc + static_cast<std::size_t>(ic) * K * K;
                    float* gwk = gwoc + static_cast<std::size_t>(ic) * K * K;
                    for (int kr = 0; kr < K; ++kr) {
                        const int ir = orow * S + kr - P;
                        if (ir < 0 || ir >= x.rows()) continue;
                        for (int kc = 0; kc < K; ++kc) {
                            const int icc = ocol * S + kc - P;
                            if (icc < 0 || icc >= x.cols()) continue;
                            gwk[kr * K + kc] += up * x.at(ic, ir, icc);
                            dx.at(ic, ir, icc) += up * wk[kr * K + kc];
                        }
                    }
                }
            }
        }
    }
    return dx;
}

FeatureMap pool_forward(const FeatureMap& x, PoolMode mode, int k, int stride,
                        std::vector<std::int32_t>* argmax) {
    if (k < 1 || stride < 1)
        throw DomainError("pool_forward: k and stride must be >= 1");
    if (k > x.rows() || k > x.cols())
        throw ShapeError("pool_forward: window " + std::to_string(k) +
                         " exceeds input " + x.shape_str());
    const int out_r = (x.rows() - k) / stride + 1;
    const int out_c = (x.cols() - k) / stride + 1;
    FeatureMap y(x.channels(), out_r, out_c);
    if (argmax) argmax->assign(y.size(), 0);

    const float inv = 1.0f / static_cast<float>(k * k);
    std::size_t oi = 0;
    for (int c = 0; c < x.channels(); ++c)
        for (int orow = 0; orow < out_r; ++orow)
            for (int ocol = 0; ocol < out_c; ++ocol, ++oi) {
                if (mode == PoolMode::Avg) {
                    float acc = 0.0f;
                    for (int kr = 0; kr < k; ++kr)
                        for (int kc = 0; kc < k; ++kc)
                            acc += x.at(c, orow * stride + kr, ocol * stride + kc);
                    y.flat()[oi] = acc * inv;
                } else {
                    float best = x.at(c, orow * stride, ocol * stride);
                    int best_r = orow * stride, best_c = ocol * stride;
                    for (int kr = 0; kr < k; ++kr)
                        for (int kc = 0; kc < k; ++kc) {
                            const int ir = orow * stride + kr;
                            const int ic = ocol * stride + kc;
                            if (x.at(c, ir, ic) > best) { // first index wins ties
                                best = x.at(c, ir, ic);
                                best_r = ir;
                                best_c = ic;
                            }
                        }
                    y.flat()[oi] = best;
                    if (argmax)
                        (*argmax)[oi] =
                            static_cast<std::int32_t>(best_r * x.cols() + best_c);
                }
            }
    return y;
}

FeatureMap pool_backward(const FeatureMap& x, const FeatureMap& upstream,
                         PoolMode mode, int k, int stride,
                         const std::vector<std::int32_t>& argmax) {
    const int out_r = (x.rows() - k) / stride + 1;
    const int out_c = (x.cols() - k) / stride + 1;
    if (upstream.channels() != x.channels() || upstream.rows() != out_r ||
        upstream.cols() != out_c)
        throw ShapeError("pool_backward: upstream shape " + upstream.shape_str() +
                         " does not match pooled " + x.shape_str());
    FeatureMap dx(x.channels(), x.rows(), x.cols());
    const float inv = 1.0f / static_cast<float>(k * k);
    const std::size_t plane = x.plane_size();
    std::size_t oi = 0;
    for (int c = 0; c < x.channels(); ++c)
        for (int orow = 0; orow < out_r; ++orow)
            for (int ocol = 0; ocol < out_c; ++ocol, ++oi) {
                const float up = upstream.flat()[oi];
                if (mode == PoolMode::Avg) {
                    for (int kr = 0; kr < k; ++kr)
                        for (int kc = 0; kc < k; ++kc)
                            dx.at(c, orow * stride + kr, ocol * stride + kc) +=
                                up * inv;
                } else {
                    dx.flat()[c * plane + argmax[oi]] += up;
                }
            }
    return dx;
}

void DenseLayer::init_he(std::uint32_t seed) {
    Rng rng(seed);
    w.resize(static_cast<std::size_t>(out) * in);
    const double scale = std::sqrt(2.0 / static_cast<double>(in));
    for (auto& v : w) v = static_cast<float>(gaussian(rng) * scale);
    b.assign(out, 0.0f);
}

std::vector<float> dense_forward(const DenseLayer& layer,
                                 const std::vector<float>& x) {
    if (static_cast<int>(x.size()) != layer.in)
        throw ShapeError("dense_forward: input length " + std::to_string(x.size()) +
                         ", layer expects " + std::to_string(layer.in));
    std::vector<float> y(layer.out);
    for (int o = 0; o < layer.out; ++o) {
        const float* row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
        float acc = layer.b[o];
        for (int i = 0; i < layer.in; ++i) acc += row[i] * x[i];
        y[o] = acc;
    }
    return y;
}

std::vector<float> dense_backward(const DenseLayer& layer,
                                  const std::vector<float>& x,
                                  const std::vector<float>& upstream,
                                  DenseGrads& g) {
    if (g.w.size() != layer.w.size()) g.w.assign(layer.w.size(), 0.0f);
    if (g.b.size() != layer.b.size()) g.b.assign(layer.b.size(), 0.0f);
    std::vector<float> dx(layer.in, 0.0f);
    for (int o = 0; o < layer.out; ++o) {
        const float up = upstream[o];
        g.b[o] += up;
        const float* row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
        float* grow = g.w.data() + static_cast<std::size_t>(o) * layer.in;
        for (int i = 0; i < layer.in; ++i) {
            grow[i] += up * x[i];
            dx[i] += up * row[i];
        }
    }
    return dx;
}

FeatureMap relu_forward(const FeatureMap& x) {
    FeatureMap y(x.channels(), x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i)
        y.flat()[i] = x.flat()[i] > 0.0f ? x.flat()[i] : 0.0f;
    return y;
}

FeatureMap relu_backward(const FeatureMap& x, const FeatureMap& upstream) {
    FeatureMap dx(x.channels(), x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i)
        dx.flat()[i] = x.flat()[i] > 0.0f ? upstream.flat()[i] : 0.0f;
    return dx;
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

void adam_step(AdamState& state, const AdamConfig& cfg, std::vector<float>& params,
               const std::vector<float>& grads) {
    if (params.size() != grads.size())
        throw ShapeError("adam_step: parameter/gradient size mismatch");
    if (state.m.size() != params.size()) {
        state.m.assign(params.size(), 0.0f);
        state.v.assign(params.size(), 0.0f);
        state.step = 0;
    }
    for (float gv : grads)
        if (!std::isfinite(gv))
            throw TrainingError("adam_step: non-finite gradient");

    ++state.step;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0f - cfg.beta1) * grads[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0f - cfg.beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= static_cast<float>(cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps));
    }
}

void AdamOptimizer::step(const std::vector<TensorRef>& tensors,
                         const GradVec& grads) {
    if (states_.empty()) states_.resize(tensors.size());
    if (states_.size() != tensors.size() || grads.size() != tensors.size())
        throw ShapeError("AdamOptimizer: tensor/grad count mismatch");
    for (std::size_t i = 0; i < tensors.size(); ++i)
        adam_step(states_[i], cfg_, *tensors[i].values, grads[i]);
}

GradVec make_grads(const std::vector<TensorRef>& tensors) {
    GradVec g(tensors.size());
    for (std::size_t i = 0; i < tensors.size(); ++i)
        g[i].assign(tensors[i].values->size(), 0.0f);
    return g;
}

void accumulate(GradVec& into, const GradVec& from) {
    for (std::size_t i = 0; i < into.size(); ++i)
        for (std::size_t j = 0; j < into[i].size(); ++j)
            into[i][j] += from[i][j];
}

void scale(GradVec& g, float s) {
    for (auto& t : g)
        for (auto& v : t) v *= s;
}

// ---------------------------------------------------------------------------
// IoU loss
// ---------------------------------------------------------------------------

IouLossResult iou_loss(const CenterBox& pred, const CenterBox& gt) {
    if (!(gt.w > 0.0f && gt.h > 0.0f))
        throw DomainError("iou_loss: ground-truth box has non-positive extent");
    if (!(pred.w > 0.0f && pred.h > 0.0f))
        throw DomainError("iou_loss: predicted box has non-positive extent");

    const Box a = pred.corners();
    const Box b = gt.corners();
    const double iw =
        std::min<double>(a.x2, b.x2) - std::max<double>(a.x1, b.x1);
    const double ih =
        std::min<double>(a.y2, b.y2) - std::max<double>(a.y1, b.y1);
    const double area_a = static_cast<double>(pred.w) * pred.h;
    const double area_b = static_cast<double>(gt.w) * gt.h;

    IouLossResult res{1.0, {0, 0, 0, 0}};
    if (iw <= 0.0 || ih <= 0.0) return res; // disjoint: flat loss of 1

    const double inter = iw * ih;
    const double uni = area_a + area_b - inter;
    res.loss = 1.0 - inter / uni;

    // d loss / d inter and / d area_a, with union = A + B - I.
    const double dL_dI = -(uni + inter) / (uni * uni);
    const double dL_dA = inter / (uni * uni);

    // Corner gradients of the intersection.
    double dI[4] = {0, 0, 0, 0}; // x1, y1, x2, y2 of pred
    if (a.x1 >= b.x1) dI[0] = -ih;
    if (a.x2 <= b.x2) dI[2] = ih;
    if (a.y1 >= b.y1) dI[1] = -iw;
    if (a.y2 <= b.y2) dI[3] = iw;

    const double dA[4] = {-static_cast<double>(pred.h), -static_cast<double>(pred.w),
                          static_cast<double>(pred.h), static_cast<double>(pred.w)};

    double gc[4];
    for (int i = 0; i < 4; ++i) gc[i] = dL_dI * dI[i] + dL_dA * dA[i];

    // Chain corners -> (cx, cy, w, h): x1 = cx - w/2, x2 = cx + w/2, etc.
    res.grad[0] = static_cast<float>(gc[0] + gc[2]);
    res.grad[1] = static_cast<float>(gc[1] + gc[3]);
    res.grad[2] = static_cast<float>(0.5 * (gc[2] - gc[0]));
    res.grad[3] = static_cast<float>(0.5 * (gc[3] - gc[1]));
    return res;
}

// ---------------------------------------------------------------------------
// Stage plumbing shared by both networks
// ---------------------------------------------------------------------------

namespace {

FeatureMap stage_forward(const Stage& st, const FeatureMap& x, StageActs* acts) {
    FeatureMap pre = conv_forward(st.conv, x);
    FeatureMap post = relu_forward(pre);
    std::vector<std::int32_t> argmax;
    FeatureMap pooled = pool_forward(post, st.pool_mode, st.pool_k, st.pool_stride,
                                     st.pool_mode == PoolMode::Max ? &argmax : nullptr);
    FeatureMap out = st.spiral ? spiral_pool(pooled, st.fuse) : pooled;
    if (acts) {
        acts->x = x;
        acts->pre_relu = std::move(pre);
        acts->relu_out = std::move(post);
        acts->pool_out = std::move(pooled);
        acts->argmax = std::move(argmax);
    }
    return out;
}

FeatureMap stage_backward(const Stage& st, const StageActs& acts,
                          const FeatureMap& upstream, ConvGrads& g) {
    FeatureMap d_pool = st.spiral
                            ? spiral_pool_backward(acts.pool_out, upstream, st.fuse)
                            : upstream;
    FeatureMap d_relu = pool_backward(acts.relu_out, d_pool, st.pool_mode,
                                      st.pool_k, st.pool_stride, acts.argmax);
    FeatureMap d_pre = relu_backward(acts.pre_relu, d_relu);
    return conv_backward(st.conv, acts.x, d_pre, g);
}

std::vector<float> flatten(const FeatureMap& f) {
    return f.flat();
}

} // namespace

// ---------------------------------------------------------------------------
// PredictorNet
// ---------------------------------------------------------------------------

PredictorNet::PredictorNet(const Config& cfg) : cfg_(cfg) {
    int ch = 3;
    int size = cfg.image_size;
    for (int i = 0; i < 3; ++i) {
        Stage& st = stages_[i];
        st.conv.in_ch = ch;
        st.conv.out_ch = cfg.channels[i];
        st.conv.k = 3;
        st.conv.stride = 1;
        st.conv.pad = 1;
        st.conv.init_he(derive_seed(cfg.init_seed, i));
        st.pool_mode = cfg.pool;
        st.pool_k = 2;
        st.pool_stride = 2;
        st.spiral = cfg.spiral;
        st.fuse = cfg.fuse;
        size /= 2;
        ch = cfg.channels[i] * (cfg.spiral ? 2 : 1);
    }
    const int flat = ch * size * size;
    head_te_.in = flat;
    head_te_.out = 2;
    head_te_.init_he(derive_seed(cfg.init_seed, 100));
    head_dt_.in = flat;
    head_dt_.out = 5;
    head_dt_.init_he(derive_seed(cfg.init_seed, 101));
}

std::array<float, 7> PredictorNet::forward(const FeatureMap& rgb,
                                           Acts* acts) const {
    FeatureMap cur = rgb;
    for (int i = 0; i < 3; ++i) {
        cur = stage_forward(stages_[i], cur, acts ? &acts->stages[i] : nullptr);
        if (acts) acts->stage_out[i] = cur;
    }
    std::vector<float> flat = flatten(cur);
    const auto te = dense_forward(head_te_, flat);
    const auto dt = dense_forward(head_dt_, flat);
    if (acts) acts->flat = std::move(flat);
    return {te[0], te[1], dt[0], dt[1], dt[2], dt[3], dt[4]};
}

void PredictorNet::backward(const Acts& acts, const std::array<float, 7>& dout,
                            GradVec& g) const {
    DenseGrads gte{std::move(g[6]), std::move(g[7])};
    DenseGrads gdt{std::move(g[8]), std::move(g[9])};
    const std::vector<float> d_te{dout[0], dout[1]};
    const std::vector<float> d_dt{dout[2], dout[3], dout[4], dout[5], dout[6]};
    std::vector<float> d_flat = dense_backward(head_te_, acts.flat, d_te, gte);
    const std::vector<float> d_flat2 = dense_backward(head_dt_, acts.flat, d_dt, gdt);
    for (std::size_t i = 0; i < d_flat.size(); ++i) d_flat[i] += d_flat2[i];
    g[6] = std::move(gte.w);
    g[7] = std::move(gte.b);
    g[8] = std::move(gdt.w);
    g[9] = std::move(gdt.b);

    const FeatureMap& last = acts.stage_out[2];
    FeatureMap d_cur =
        FeatureMap::from_data(last.channels(), last.rows(), last.cols(),
                              std::move(d_flat));
    for (int i = 2; i >= 0; --i) {
        ConvGrads cg{std::move(g[2 * i]), std::move(g[2 * i + 1])};
        d_cur = stage_backward(stages_[i], acts.stages[i], d_cur, cg);
        g[2 * i] = std::move(cg.w);
        g[2 * i + 1] = std::move(cg.b);
    }
}

std::vector<TensorRef> PredictorNet::tensors() {
    std::vector<TensorRef> t;
    for (int i = 0; i < 3; ++i) {
        const std::string base = "predictor.stage" + std::to_string(i);
        t.push_back({base + ".w", &stages_[i].conv.w,
                     {stages_[i].conv.out_ch, stages_[i].conv.in_ch,
                      stages_[i].conv.k, stages_[i].conv.k}});
        t.push_back({base + ".b", &stages_[i].conv.b, {stages_[i].conv.out_ch}});
    }
    t.push_back({"predictor.head_te.w", &head_te_.w, {head_te_.out, head_te_.in}});
    t.push_back({"predictor.head_te.b", &head_te_.b, {head_te_.out}});
    t.push_back({"predictor.head_dt.w", &head_dt_.w, {head_dt_.out, head_dt_.in}});
    t.push_back({"predictor.head_dt.b", &head_dt_.b, {head_dt_.out}});
    return t;
}

std::vector<TensorRef> PredictorNet::tensors() const {
    return const_cast<PredictorNet*>(this)->tensors();
}

// ---------------------------------------------------------------------------
// DetectorNet
// ---------------------------------------------------------------------------

DetectorNet::DetectorNet(const Config& cfg) : cfg_(cfg) {
    int ch = cfg.in_channels;
    int size = cfg.image_size;
    const int pool_ks[4] = {2, 2, 2, 1};
    for (int i = 0; i < 4; ++i) {
        Stage& st = stages_[i];
        st.conv.in_ch = ch;
        st.conv.out_ch = cfg.channels[i];
        st.conv.k = 3;
        st.conv.stride = 1;
        st.conv.pad = 1;
        st.conv.init_he(derive_seed(cfg.init_seed, i));
        st.pool_mode = cfg.pool;
        st.pool_k = pool_ks[i];
        st.pool_stride = pool_ks[i];
        st.spiral = cfg.spiral;
        st.fuse = cfg.fuse;
        size = (size - st.pool_k) / st.pool_stride + 1;
        ch = cfg.channels[i] * (cfg.spiral ? 2 : 1);
    }
    grid_ = size;
    head_.in_ch = ch;
    head_.out_ch = 9; // obj + 4 box + 4 class
    head_.k = 1;
    head_.stride = 1;
    head_.pad = 0;
    head_.init_he(derive_seed(cfg.init_seed, 100));
}

FeatureMap DetectorNet::forward(const FeatureMap& stack, Acts* acts, bool training,
                                std::uint32_t dropout_seed) const {
    FeatureMap cur = stack;
    for (int i = 0; i < 4; ++i) {
        cur = stage_forward(stages_[i], cur, acts ? &acts->stages[i] : nullptr);
        if (acts) acts->stage_out[i] = cur;
    }
    if (training && cfg_.dropout > 0.0f) {
        Rng rng(dropout_seed);
        const float keep_scale = 1.0f / (1.0f - cfg_.dropout);
        std::vector<float> mask(cur.size());
        for (auto& m : mask)
            m = uniform01(rng) < cfg_.dropout ? 0.0f : keep_scale;
        for (std::size_t i = 0; i < cur.size(); ++i) cur.flat()[i] *= mask[i];
        if (acts) acts->dropout_mask = std::move(mask);
    }
    if (acts) acts->head_in = cur;
    return conv_forward(head_, cur);
}

FeatureMap DetectorNet::backward(const Acts& acts, const FeatureMap& upstream,
                                 GradVec& g) const {
    ConvGrads gh{std::move(g[8]), std::move(g[9])};
    FeatureMap d_cur = conv_backward(head_, acts.head_in, upstream, gh);
    g[8] = std::move(gh.w);
    g[9] = std::move(gh.b);
    if (!acts.dropout_mask.empty())
        for (std::size_t i = 0; i < d_cur.size(); ++i)
            d_cur.flat()[i] *= acts.dropout_mask[i];
    for (int i = 3; i >= 0; --i) {
        ConvGrads cg{std::move(g[2 * i]), std::move(g[2 * i + 1])};
        d_cur = stage_backward(stages_[i], acts.stages[i], d_cur, cg);
        g[2 * i] = std::move(cg.w);
        g[2 * i + 1] = std::move(cg.b);
    }
    return d_cur;
}

std::vector<TensorRef> DetectorNet::tensors() {
    std::vector<TensorRef> t;
    for (int i = 0; i < 4; ++i) {
        const std::string base = "detector.stage" + std::to_string(i);
        t.push_back({base + ".w", &stages_[i].conv.w,
                     {stages_[i].conv.out_ch, stages_[i].conv.in_ch,
                      stages_[i].conv.k, stages_[i].conv.k}});
        t.push_back({base + ".b", &stages_[i].conv.b, {stages_[i].conv.out_ch}});
    }
    t.push_back({"detector.head.w", &head_.w,
                 {head_.out_ch, head_.in_ch, head_.k, head_.k}});
    t.push_back({"detector.head.b", &head_.b, {head_.out_ch}});
    return t;
}

std::vector<TensorRef> DetectorNet::tensors() const {
    return const_cast<DetectorNet*>(this)->tensors();
}

// ---------------------------------------------------------------------------
// Detector output handling
// ---------------------------------------------------------------------------

namespace {

inline float sigmoidf(float z) { return 1.0f / (1.0f + std::exp(-z)); }

/// Numerically stable binary cross entropy on a logit.
inline double bce_logit(float z, float target) {
    const double az = std::fabs(z);
    return std::max(0.0, static_cast<double>(z)) -
           static_cast<double>(z) * target + std::log1p(std::exp(-az));
}

} // namespace

float DetectorOutput::objectness(int gr, int gc) const {
    return sigmoidf(raw.at(0, gr, gc));
}

CenterBox DetectorOutput::box(int gr, int gc) const {
    return {sigmoidf(raw.at(1, gr, gc)), sigmoidf(raw.at(2, gr, gc)),
            sigmoidf(raw.at(3, gr, gc)), sigmoidf(raw.at(4, gr, gc))};
}

std::array<float, 4> DetectorOutput::class_logits(int gr, int gc) const {
    return {raw.at(5, gr, gc), raw.at(6, gr, gc), raw.at(7, gr, gc),
            raw.at(8, gr, gc)};
}

DetectionLossResult detection_loss(const DetectorOutput& out,
                                   const GroundTruthSet& gts_normalized) {
    const int G = out.grid;
    DetectionLossResult res;
    res.grad = FeatureMap(9, G, G);

    // Cell assignment: the cell holding the box center owns the target;
    // collisions keep the larger box.
    std::vector<int> target_gt(static_cast<std::size_t>(G) * G, -1);
    for (std::size_t i = 0; i < gts_normalized.size(); ++i) {
        const Box& b = gts_normalized[i].box;
        const float cx = 0.5f * (b.x1 + b.x2);
        const float cy = 0.5f * (b.y1 + b.y2);
        const int gc = std::min(G - 1, std::max(0, static_cast<int>(cx * G)));
        const int gr = std::min(G - 1, std::max(0, static_cast<int>(cy * G)));
        int& slot = target_gt[static_cast<std::size_t>(gr) * G + gc];
        if (slot < 0 || gts_normalized[i].box.area() >
                            gts_normalized[slot].box.area())
            slot = static_cast<int>(i);
    }

    float max_obj = 0.0f;
    for (int gr = 0; gr < G; ++gr) {
        for (int gc = 0; gc < G; ++gc) {
            const int gt_idx = target_gt[static_cast<std::size_t>(gr) * G + gc];
            const float zo = out.raw.at(0, gr, gc);
            const float target = gt_idx >= 0 ? 1.0f : 0.0f;
            res.objectness_loss += bce_logit(zo, target);
            res.grad.at(0, gr, gc) = sigmoidf(zo) - target;
            max_obj = std::max(max_obj, sigmoidf(zo));
            if (gt_idx < 0) continue;

            const GroundTruth& gt = gts_normalized[gt_idx];
            const CenterBox pred = out.box(gr, gc);
            const CenterBox gt_center = CenterBox::from_corners(gt.box);
            const IouLossResult il = iou_loss(pred, gt_center);
            res.box_loss += il.loss;
            const float sig[4] = {pred.cx, pred.cy, pred.w, pred.h};
            for (int i = 0; i < 4; ++i)
                res.grad.at(1 + i, gr, gc) =
                    il.grad[i] * sig[i] * (1.0f - sig[i]);

            // softmax cross entropy over the four classes
            const auto logits = out.class_logits(gr, gc);
            float zmax = logits[0];
            for (float z : logits) zmax = std::max(zmax, z);
            double denom = 0.0;
            for (float z : logits) denom += std::exp(static_cast<double>(z - zmax));
            res.class_loss +=
                -(static_cast<double>(logits[gt.cls] - zmax) - std::log(denom));
            for (int c = 0; c < 4; ++c) {
                const double p = std::exp(static_cast<double>(logits[c] - zmax)) / denom;
                res.grad.at(5 + c, gr, gc) =
                    static_cast<float>(p - (c == gt.cls ? 1.0 : 0.0));
            }
        }
    }
    res.mean_confidence = max_obj;
    res.loss = res.objectness_loss + res.box_loss + res.class_loss;
    return res;
}

DetectionSet extract_detections(const DetectorOutput& out, int image_size,
                                int image_id, float conf_floor, float nms_iou) {
    const int G = out.grid;
    DetectionSet raw;
    for (int gr = 0; gr < G; ++gr)
        for (int gc = 0; gc < G; ++gc) {
            const float obj = out.objectness(gr, gc);
            if (obj < conf_floor) continue;
            const auto logits = out.class_logits(gr, gc);
            float zmax = logits[0];
            int cls = 0;
            for (int c = 1; c < 4; ++c)
                if (logits[c] > zmax) { zmax = logits[c]; cls = c; }
            double denom = 0.0;
            for (float z : logits) denom += std::exp(static_cast<double>(z - zmax));
            const float cls_prob = static_cast<float>(1.0 / denom);

            const CenterBox cb = out.box(gr, gc);
            Box px{cb.cx * image_size - 0.5f * cb.w * image_size,
                   cb.cy * image_size - 0.5f * cb.h * image_size,
                   cb.cx * image_size + 0.5f * cb.w * image_size,
                   cb.cy * image_size + 0.5f * cb.h * image_size};
            px.x1 = std::max(0.0f, px.x1);
            px.y1 = std::max(0.0f, px.y1);
            px.x2 = std::min(static_cast<float>(image_size), px.x2);
            px.y2 = std::min(static_cast<float>(image_size), px.y2);
            if (!(px.x2 - px.x1 > 0.5f && px.y2 - px.y1 > 0.5f)) continue;
            raw.push_back({px, cls, obj * cls_prob, image_id});
        }

    // class-wise greedy NMS
    std::stable_sort(raw.begin(), raw.end(),
                     [](const Detection& a, const Detection& b) {
                         return a.confidence > b.confidence;
                     });
    DetectionSet keep;
    for (const auto& d : raw) {
        bool suppressed = false;
        for (const auto& k : keep)
            if (k.cls == d.cls && iou(k.box, d.box) > nms_iou) {
                suppressed = true;
                break;
            }
        if (!suppressed) keep.push_back(d);
    }
    return keep;
}

} // namespace spiralx
