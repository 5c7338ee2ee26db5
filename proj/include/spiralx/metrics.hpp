#ifndef SPIRALX_METRICS_HPP
#define SPIRALX_METRICS_HPP

#include <array>
#include <optional>
#include <vector>

#include "spiralx/tensor.hpp"

namespace spiralx {

constexpr int kNumClasses = 4;
/// Damage-type class order used everywhere, including confusion rows.
enum DamageClass : int { Undamaged = 0, Flexural = 1, Shear = 2, Combined = 3 };
const char* damage_class_name(int cls);

/// Axis-aligned box with well-ordered corners (x1 < x2, y1 < y2).
struct Box {
    float x1, y1, x2, y2;

    float area() const { return (x2 - x1) * (y2 - y1); }
    bool valid() const { return x1 < x2 && y1 < y2; }
};

struct Detection {
    Box box;
    int cls = 0;
    float confidence = 0.0f;
    int image_id = 0;
};

struct GroundTruth {
    Box box;
    int cls = 0;
    int image_id = 0;
};

using DetectionSet = std::vector<Detection>;
using GroundTruthSet = std::vector<GroundTruth>;

/// Intersection-over-union; 0 when disjoint, 1 when identical.
double iou(const Box& a, const Box& b);

struct MatchResult {
    int tp = 0;
    int fp = 0;
    int fn = 0;
    /// Parallel to the confidence-sorted detection list: true where TP.
    std::vector<bool> matched;
};

/// Greedy matching in descending confidence order: a detection is a TP when
/// its best-IoU unmatched same-class ground truth reaches the threshold.
/// Detections and ground truths are paired per image id.
MatchResult match_detections(const DetectionSet& dets, const GroundTruthSet& gts,
                             double iou_thr);

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// TP/(TP+FP), TP/(TP+FN), harmonic mean; 0/0 is defined as 0.
Prf precision_recall_f1(const MatchResult& m);

/// All-points interpolated average precision over the full confidence
/// ranking. Returns nullopt when there are no ground truths (undefined,
/// deliberately distinct from 0).
std::optional<double> average_precision(const DetectionSet& dets,
                                        const GroundTruthSet& gts,
                                        double iou_thr);

/// The ten IoU thresholds 0.50 : 0.05 : 0.95.
std::array<double, 10> map_thresholds();

struct MapMar {
    double map = 0.0;
    double mar = 0.0;
};

/// Mean over the ten thresholds of class-averaged AP and class-averaged
/// maximum recall. Classes with no ground truths are skipped.
std::optional<MapMar> map_mar(const DetectionSet& dets, const GroundTruthSet& gts);

/// Row-normalized 4x4 confusion matrix. Boxes are paired class-agnostically
/// so cross-class mistakes land off the diagonal; unmatched ground truths
/// count into the per-class miss column and unmatched detections into the
/// background false-positive tally. Each row of (matrix + miss) sums to 1,
/// or to 0 for a class with no ground truths.
struct ConfusionMatrix {
    std::array<std::array<double, kNumClasses>, kNumClasses> matrix{};
    std::array<double, kNumClasses> miss{};
    std::array<int, kNumClasses> background_fp{};
    std::array<std::array<int, kNumClasses>, kNumClasses> raw{};
    std::array<int, kNumClasses> raw_miss{};
};

ConfusionMatrix normalized_confusion(const DetectionSet& dets,
                                     const GroundTruthSet& gts, double iou_thr);

} // namespace spiralx

#endif
