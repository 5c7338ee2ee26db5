#ifndef SPIRALX_NETS_HPP
#define SPIRALX_NETS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "spiralx/metrics.hpp"
#include "spiralx/spiral.hpp"
#include "spiralx/tensor.hpp"

namespace spiralx {

struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Primitive layers. Each forward has an exact hand-written backward; all of
// them are covered by central finite-difference checks in the test suite.
// ---------------------------------------------------------------------------

struct ConvLayer {
    int in_ch = 0, out_ch = 0, k = 3, stride = 1, pad = 1;
    std::vector<float> w; // out_ch x in_ch x k x k
    std::vector<float> b; // out_ch

    void init_he(std::uint32_t seed);
    int out_size(int in) const { return (in + 2 * pad - k) / stride + 1; }
};

struct ConvGrads {
    std::vector<float> w, b;
};

FeatureMap conv_forward(const ConvLayer& layer, const FeatureMap& x);
/// Accumulates weight/bias gradients into g and returns grad wrt x.
FeatureMap conv_backward(const ConvLayer& layer, const FeatureMap& x,
                         const FeatureMap& upstream, ConvGrads& g);

enum class PoolMode { Avg, Max };

/// Standard pooling; max records its argmax (first index wins ties) for the
/// backward pass.
FeatureMap pool_forward(const FeatureMap& x, PoolMode mode, int k, int stride,
                        std::vector<std::int32_t>* argmax = nullptr);
FeatureMap pool_backward(const FeatureMap& x, const FeatureMap& upstream,
                         PoolMode mode, int k, int stride,
                         const std::vector<std::int32_t>& argmax);

struct DenseLayer {
    int in = 0, out = 0;
    std::vector<float> w; // out x in
    std::vector<float> b; // out

    void init_he(std::uint32_t seed);
};

struct DenseGrads {
    std::vector<float> w, b;
};

std::vector<float> dense_forward(const DenseLayer& layer,
                                 const std::vector<float>& x);
std::vector<float> dense_backward(const DenseLayer& layer,
                                  const std::vector<float>& x,
                                  const std::vector<float>& upstream,
                                  DenseGrads& g);

FeatureMap relu_forward(const FeatureMap& x);
FeatureMap relu_backward(const FeatureMap& x, const FeatureMap& upstream);

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

struct AdamConfig {
    float lr = 0.001f;
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float eps = 1e-8f;
};

struct AdamState {
    std::vector<float> m, v;
    long step = 0;
};

/// One bias-corrected Adam update. Throws TrainingError on non-finite
/// gradients.
void adam_step(AdamState& state, const AdamConfig& cfg, std::vector<float>& params,
               const std::vector<float>& grads);

// ---------------------------------------------------------------------------
// IoU loss
// ---------------------------------------------------------------------------

struct CenterBox {
    float cx, cy, w, h;

    Box corners() const {
        return Box{cx - 0.5f * w, cy - 0.5f * h, cx + 0.5f * w, cy + 0.5f * h};
    }
    static CenterBox from_corners(const Box& b) {
        return {0.5f * (b.x1 + b.x2), 0.5f * (b.y1 + b.y2), b.x2 - b.x1,
                b.y2 - b.y1};
    }
};

struct IouLossResult {
    double loss;                  // 1 - IoU
    std::array<float, 4> grad;    // d loss / d (cx, cy, w, h) of pred
};

IouLossResult iou_loss(const CenterBox& pred, const CenterBox& gt);

// ---------------------------------------------------------------------------
// Networks. A stage is conv -> ReLU -> pool -> optional spiral pool; the
// caches needed for backward live in an Acts value so per-sample calls can
// run concurrently. Gradients go into an ordered, shape-matched GradVec.
// ---------------------------------------------------------------------------

struct Stage {
    ConvLayer conv;
    PoolMode pool_mode = PoolMode::Avg;
    int pool_k = 2, pool_stride = 2;
    bool spiral = false;
    FuseMode fuse = FuseMode::Multiply;
};

struct StageActs {
    FeatureMap x;        // conv input
    FeatureMap pre_relu; // conv output
    FeatureMap relu_out; // pool input
    FeatureMap pool_out; // spiral input (and stage output when no spiral)
    std::vector<std::int32_t> argmax;
};

using GradVec = std::vector<std::vector<float>>;

struct TensorRef {
    std::string name;
    std::vector<float>* values;
    std::vector<int> shape;
};

/// Runs Adam per named tensor, keeping one moment pair per slot.
class AdamOptimizer {
public:
    explicit AdamOptimizer(AdamConfig cfg = {}) : cfg_(cfg) {}
    void step(const std::vector<TensorRef>& tensors, const GradVec& grads);

private:
    AdamConfig cfg_;
    std::vector<AdamState> states_;
};

GradVec make_grads(const std::vector<TensorRef>& tensors);
void accumulate(GradVec& into, const GradVec& from);
void scale(GradVec& g, float s);

/// Stand-in for the modality predictor: a small convnet with two parallel
/// dense heads emitting the raw (T_e, D_t) values; outputs are unclamped.
class PredictorNet {
public:
    struct Config {
        int image_size = 64;
        bool spiral = true;
        FuseMode fuse = FuseMode::Multiply;
        PoolMode pool = PoolMode::Avg;
        std::array<int, 3> channels = {6, 8, 8};
        std::uint32_t init_seed = 1;
    };

    struct Acts {
        std::array<StageActs, 3> stages;
        std::array<FeatureMap, 3> stage_out;
        std::vector<float> flat;
    };

    explicit PredictorNet(const Config& cfg);

    const Config& config() const { return cfg_; }
    std::array<float, 7> forward(const FeatureMap& rgb, Acts* acts = nullptr) const;
    /// dout is d loss / d raw7. Returns nothing; gradients land in g.
    void backward(const Acts& acts, const std::array<float, 7>& dout,
                  GradVec& g) const;

    std::vector<TensorRef> tensors();
    std::vector<TensorRef> tensors() const;

private:
    Config cfg_;
    std::array<Stage, 3> stages_;
    DenseLayer head_te_; // 2 values
    DenseLayer head_dt_; // 5 values
};

/// Anchor-free grid detector: four conv stages then a 1x1 head emitting, per
/// cell, an objectness logit, four box logits (sigmoid -> cx, cy, w, h in
/// image-normalized units) and four class logits.
class DetectorNet {
public:
    struct Config {
        int image_size = 64;
        int in_channels = 9; // 3 when the stem block is ablated
        bool spiral = true;
        FuseMode fuse = FuseMode::Multiply;
        PoolMode pool = PoolMode::Avg;
        std::array<int, 4> channels = {10, 14, 18, 20};
        float dropout = 0.4f;
        std::uint32_t init_seed = 2;
    };

    struct Acts {
        std::array<StageActs, 4> stages;
        std::array<FeatureMap, 4> stage_out;
        FeatureMap head_in; // after dropout
        std::vector<float> dropout_mask;
    };

    explicit DetectorNet(const Config& cfg);

    const Config& config() const { return cfg_; }
    int grid() const { return grid_; }

    /// training enables dropout with a mask derived from dropout_seed.
    FeatureMap forward(const FeatureMap& stack, Acts* acts = nullptr,
                       bool training = false, std::uint32_t dropout_seed = 0) const;
    FeatureMap backward(const Acts& acts, const FeatureMap& upstream,
                        GradVec& g) const;

    std::vector<TensorRef> tensors();
    std::vector<TensorRef> tensors() const;

private:
    Config cfg_;
    std::array<Stage, 4> stages_;
    ConvLayer head_;
    int grid_ = 0;
};

// ---------------------------------------------------------------------------
// Detector output handling
// ---------------------------------------------------------------------------

/// Raw 9xGxG head output decoded per cell.
struct DetectorOutput {
    int grid = 0;
    FeatureMap raw;

    float objectness(int gr, int gc) const; // sigmoid
    CenterBox box(int gr, int gc) const;    // sigmoid, normalized to [0,1]
    std::array<float, 4> class_logits(int gr, int gc) const;
};

struct DetectionLossResult {
    double loss = 0.0;
    double objectness_loss = 0.0;
    double box_loss = 0.0;
    double class_loss = 0.0;
    FeatureMap grad; // d loss / d raw
    double mean_confidence = 0.0; // mean over cells of max objectness per image
};

/// Objectness BCE summed over all cells, plus IoU loss and class cross
/// entropy on cells holding a ground-truth center. Boxes arrive in image
/// normalized coordinates.
DetectionLossResult detection_loss(const DetectorOutput& out,
                                   const GroundTruthSet& gts_normalized);

/// Grid output -> detections in pixel units, with class-wise greedy NMS.
DetectionSet extract_detections(const DetectorOutput& out, int image_size,
                                int image_id, float conf_floor = 0.1f,
                                float nms_iou = 0.5f);

} // namespace spiralx

#endif
