#include "spiralx/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace spiralx {

const char* damage_class_name(int cls) {
    switch (cls) {
        case Undamaged: return "undamaged";
        case Flexural: return "flexural";
        case Shear: return "shear";
        case Combined: return "combined";
        default: return "unknown";
    }
}

double iou(const Box& a, const Box& b) {
    if (!a.valid() || !b.valid())
        throw DomainError("iou: degenerate box (corners must satisfy x1<x2, y1<y2)");
    const float ix1 = std::max(a.x1, b.x1);
    const float iy1 = std::max(a.y1, b.y1);
    const float ix2 = std::min(a.x2, b.x2);
    const float iy2 = std::min(a.y2, b.y2);
    const float iw = ix2 - ix1;
    const float ih = iy2 - iy1;
    if (iw <= 0.0f || ih <= 0.0f) return 0.0;
    const float inter = iw * ih;
    const float uni = a.area() + b.area() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

/// Stable confidence ordering: ties broken by image id then insertion order.
std::vector<std::size_t> confidence_order(const DetectionSet& dets) {
    std::vector<std::size_t> idx(dets.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (dets[a].confidence != dets[b].confidence)
            return dets[a].confidence > dets[b].confidence;
        return dets[a].image_id < dets[b].image_id;
    });
    return idx;
}

/// TP flags in confidence order. class_aware=false pairs boxes regardless of
/// class (confusion-matrix mode); gt_match[i] then records which detection
/// took ground truth i, or -1.
std::vector<bool> greedy_match(const DetectionSet& dets, const GroundTruthSet& gts,
                               double iou_thr, bool class_aware,
                               const std::vector<std::size_t>& order,
                               std::vector<int>* gt_match_out) {
    std::vector<int> gt_match(gts.size(), -1);
    std::vector<bool> tp(order.size(), false);
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const Detection& d = dets[order[oi]];
        double best = 0.0;
        int best_gt = -1;
        for (std::size_t gi = 0; gi < gts.size(); ++gi) {
            if (gt_match[gi] >= 0) continue;
            if (gts[gi].image_id != d.image_id) continue;
            if (class_aware && gts[gi].cls != d.cls) continue;
            const double v = iou(d.box, gts[gi].box);
            if (v > best) {
                best = v;
                best_gt = static_cast<int>(gi);
            }
        }
        if (best_gt >= 0 && best >= iou_thr) {
            gt_match[best_gt] = static_cast<int>(order[oi]);
            tp[oi] = true;
        }
    }
    if (gt_match_out) *gt_match_out = std::move(gt_match);
    return tp;
}

} // namespace

MatchResult match_detections(const DetectionSet& dets, const GroundTruthSet& gts,
                             double iou_thr) {
    const auto order = confidence_order(dets);
    MatchResult m;
    m.matched = greedy_match(dets, gts, iou_thr, true, order, nullptr);
    for (bool f : m.matched) f ? ++m.tp : ++m.fp;
    m.fn = static_cast<int>(gts.size()) - m.tp;
    return m;
}

Prf precision_recall_f1(const MatchResult& m) {
    Prf out;
    const int p_den = m.tp + m.fp;
    const int r_den = m.tp + m.fn;
    out.precision = p_den > 0 ? static_cast<double>(m.tp) / p_den : 0.0;
    out.recall = r_den > 0 ? static_cast<double>(m.tp) / r_den : 0.0;
    const double s = out.precision + out.recall;
    out.f1 = s > 0.0 ? 2.0 * out.precision * out.recall / s : 0.0;
    return out;
}

std::optional<double> average_precision(const DetectionSet& dets,
                                        const GroundTruthSet& gts,
                                        double iou_thr) {
    if (gts.empty()) return std::nullopt;
    const auto order = confidence_order(dets);
    const auto tp = greedy_match(dets, gts, iou_thr, true, order, nullptr);

    // PR points along the ranking, then integrate the precision envelope.
    const double n_gt = static_cast<double>(gts.size());
    std::vector<double> precision(tp.size()), recall(tp.size());
    int cum_tp = 0;
    for (std::size_t i = 0; i < tp.size(); ++i) {
        if (tp[i]) ++cum_tp;
        precision[i] = static_cast<double>(cum_tp) / static_cast<double>(i + 1);
        recall[i] = static_cast<double>(cum_tp) / n_gt;
    }
    for (std::size_t i = precision.size(); i-- > 1;)
        precision[i - 1] = std::max(precision[i - 1], precision[i]);

    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < tp.size(); ++i) {
        ap += (recall[i] - prev_recall) * precision[i];
        prev_recall = recall[i];
    }
    return ap;
}

std::array<double, 10> map_thresholds() {
    std::array<double, 10> t{};
    for (int i = 0; i < 10; ++i) t[i] = 0.50 + 0.05 * i;
    return t;
}

namespace {

DetectionSet filter_dets(const DetectionSet& dets, int cls) {
    DetectionSet out;
    for (const auto& d : dets)
        if (d.cls == cls) out.push_back(d);
    return out;
}

GroundTruthSet filter_gts(const GroundTruthSet& gts, int cls) {
    GroundTruthSet out;
    for (const auto& g : gts)
        if (g.cls == cls) out.push_back(g);
    return out;
}

} // namespace

std::optional<MapMar> map_mar(const DetectionSet& dets, const GroundTruthSet& gts) {
    if (gts.empty()) return std::nullopt;
    MapMar acc;
    for (double thr : map_thresholds()) {
        double ap_sum = 0.0, recall_sum = 0.0;
        int classes = 0;
        for (int cls = 0; cls < kNumClasses; ++cls) {
            const auto cls_gts = filter_gts(gts, cls);
            if (cls_gts.empty()) continue;
            const auto cls_dets = filter_dets(dets, cls);
            ap_sum += average_precision(cls_dets, cls_gts, thr).value();
            // Maximum recall: every detection admitted.
            const auto m = match_detections(cls_dets, cls_gts, thr);
            recall_sum += static_cast<double>(m.tp) / static_cast<double>(cls_gts.size());
            ++classes;
        }
        acc.map += ap_sum / classes;
        acc.mar += recall_sum / classes;
    }
    acc.map /= 10.0;
    acc.mar /= 10.0;
    return acc;
}

ConfusionMatrix normalized_confusion(const DetectionSet& dets,
                                     const GroundTruthSet& gts, double iou_thr) {
    ConfusionMatrix cm;
    const auto order = confidence_order(dets);
    std::vector<int> gt_match;
    const auto tp = greedy_match(dets, gts, iou_thr, false, order, &gt_match);

    for (std::size_t gi = 0; gi < gts.size(); ++gi) {
        if (gt_match[gi] >= 0)
            ++cm.raw[gts[gi].cls][dets[gt_match[gi]].cls];
        else
            ++cm.raw_miss[gts[gi].cls];
    }
    for (std::size_t oi = 0; oi < order.size(); ++oi)
        if (!tp[oi]) ++cm.background_fp[dets[order[oi]].cls];

    for (int r = 0; r < kNumClasses; ++r) {
        int total = cm.raw_miss[r];
        for (int c = 0; c < kNumClasses; ++c) total += cm.raw[r][c];
        if (total == 0) continue;
        for (int c = 0; c < kNumClasses; ++c)
            cm.matrix[r][c] = static_cast<double>(cm.raw[r][c]) / total;
        cm.miss[r] = static_cast<double>(cm.raw_miss[r]) / total;
    }
    return cm;
}

} // namespace spiralx
