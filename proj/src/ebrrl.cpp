#include "spiralx/ebrrl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spiralx/parallel.hpp"
#include "spiralx/rng.hpp"

namespace spiralx {

// ---------------------------------------------------------------------------
// Rewards
// ---------------------------------------------------------------------------

void RewardWeights::validate() const {
    if (parent < 0.0 || child_thermal < 0.0 || child_dark < 0.0)
        throw DomainError("reward weights must be non-negative");
    const double sum = parent + child_thermal + child_dark;
    if (std::fabs(sum - 1.0) > 1e-9)
        throw DomainError("reward weights must sum to 1, got " +
                          std::to_string(sum));
}

double aggregate_reward(const ActionRecord& a) {
    a.weights.validate();
    const double scores[3] = {a.parent_score, a.child_thermal_score,
                              a.child_dark_score};
    for (double s : scores)
        if (!(s >= 0.0 && s <= 1.0))
            throw DomainError("aggregate_reward: score " + std::to_string(s) +
                              " outside [0,1]");
    return a.weights.parent * a.parent_score +
           a.weights.child_thermal * a.child_thermal_score +
           a.weights.child_dark * a.child_dark_score;
}

double discounted_return(const std::vector<double>& rewards, double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw DomainError("discounted_return: gamma must be in [0,1)");
    double acc = 0.0;
    double g = 1.0;
    for (double r : rewards) {
        acc += g * r;
        g *= gamma;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Replay buffer
// ---------------------------------------------------------------------------

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::uint32_t seed)
    : capacity_(capacity), rng_(seed) {
    if (capacity_ == 0) throw DomainError("ReplayBuffer: capacity must be > 0");
    ring_.reserve(capacity_);
}

void ReplayBuffer::push(const Transition& t) {
    if (ring_.size() < capacity_) {
        ring_.push_back(t);
        head_ = ring_.size() % capacity_;
        full_ = ring_.size() == capacity_;
    } else {
        ring_[head_] = t;
        head_ = (head_ + 1) % capacity_;
    }
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    if (i >= size()) throw DomainError("ReplayBuffer::at: index out of range");
    if (!full_) return ring_[i];
    return ring_[(head_ + i) % capacity_];
}

std::optional<std::vector<Transition>> ReplayBuffer::sample(std::size_t n) {
    if (size() < n) return std::nullopt;
    // Partial Fisher-Yates over indices: uniform without replacement.
    std::vector<std::uint32_t> idx(size());
    std::iota(idx.begin(), idx.end(), 0u);
    std::vector<Transition> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j =
            i + uniform_below(rng_, static_cast<std::uint32_t>(idx.size() - i));
        std::swap(idx[i], idx[j]);
        out.push_back(at(idx[i]));
    }
    return out;
}

std::map<std::pair<int, int>, int> ReplayBuffer::transition_counts(
    int levels) const {
    if (levels < 1) throw DomainError("transition_counts: levels must be >= 1");
    std::map<std::pair<int, int>, int> counts;
    auto bucket = [levels](float v) {
        const int b = static_cast<int>(clamp01(v) * static_cast<float>(levels));
        return std::min(b, levels - 1);
    };
    for (std::size_t i = 0; i < size(); ++i) {
        const Transition& t = at(i);
        ++counts[{bucket(t.state_digest[0]), bucket(t.next_state_digest[0])}];
    }
    return counts;
}

// ---------------------------------------------------------------------------
// State digest
// ---------------------------------------------------------------------------

namespace {

struct MeanStd {
    float mean, stdev;
};

MeanStd mean_std(const float* data, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += data[i];
    const double mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = data[i] - mean;
        var += d * d;
    }
    return {static_cast<float>(mean),
            static_cast<float>(std::sqrt(var / static_cast<double>(n)))};
}

} // namespace

std::array<float, kDigestSize> state_digest(const Image& rgb,
                                            const FeatureMap& stack,
                                            float running_detector_loss,
                                            float running_reward,
                                            float episode_progress) {
    std::array<float, kDigestSize> d{};
    const std::size_t plane = rgb.plane_size();
    // Classical state: per-channel statistics of the raw image, in [0,1].
    for (int ch = 0; ch < 3; ++ch) {
        const MeanStd ms = mean_std(rgb.flat().data() + ch * plane, plane);
        d[ch] = ms.mean / 255.0f;
        d[3 + ch] = ms.stdev / 255.0f;
    }
    double luma_sum = 0.0;
    for (std::size_t i = 0; i < plane; ++i)
        luma_sum += luma(rgb.flat()[i], rgb.flat()[plane + i],
                         rgb.flat()[2 * plane + i]);
    d[6] = static_cast<float>(luma_sum / (255.0 * static_cast<double>(plane)));

    // Varied state: statistics of the modality stack (already in [0,1]).
    const std::size_t splane = stack.plane_size();
    const int blocks = stack.channels() / 3;
    const MeanStd tl = mean_std(stack.data(), splane * 3);
    const MeanStd dt = blocks >= 2 ? mean_std(stack.data() + 3 * splane, splane * 3)
                                   : tl;
    const MeanStd all = mean_std(stack.data(), stack.size());
    d[7] = tl.mean;
    d[8] = tl.stdev;
    d[9] = dt.mean;
    d[10] = dt.stdev;
    d[11] = all.mean;
    d[12] = all.stdev;

    d[13] = running_detector_loss / (1.0f + std::fabs(running_detector_loss));
    d[14] = running_reward;
    d[15] = episode_progress;
    return d;
}

// ---------------------------------------------------------------------------
// Orchestrator
// ---------------------------------------------------------------------------

TrainOrchestrator::TrainOrchestrator(PredictorNet& predictor, DetectorNet& detector,
                                     const TrainingSet& data,
                                     const OrchestratorConfig& cfg)
    : predictor_(predictor), detector_(detector), data_(data), cfg_(cfg),
      buffer_(cfg.buffer_capacity, derive_seed(cfg.seed, 2)),
      predictor_opt_(AdamConfig{cfg.predictor_lr, 0.9f, 0.999f, 1e-8f}),
      detector_opt_(AdamConfig{cfg.detector_lr, 0.9f, 0.999f, 1e-8f}),
      rng_(derive_seed(cfg.seed, 1)) {
    if (data_.images.empty())
        throw DomainError("TrainOrchestrator: empty training set");
    weights_.validate();
}

void TrainOrchestrator::log(TrainEvent e) {
    event_log_.push_back({e, predictor_steps_, round_});
}

FeatureMap TrainOrchestrator::detector_input(const Image& img,
                                             const PredictionTuples& preds,
                                             ModalityStack* stack_out) const {
    if (!cfg_.stem_enabled) {
        if (stack_out) *stack_out = ModalityStack{};
        return rgb_stack(img);
    }
    ModalityStack s = build_modality_stack(img, preds);
    FeatureMap out = s.stacked;
    if (stack_out) *stack_out = std::move(s);
    return out;
}

double TrainOrchestrator::modality_confidence(
    const std::vector<int>& image_indices,
    const std::vector<PredictionTuples>& preds, int block) const {
    // Confidence of the detector when it sees one modality in isolation:
    // the other channel blocks are zeroed.
    std::vector<double> conf(image_indices.size(), 0.0);
    parallel_for(static_cast<int>(image_indices.size()), cfg_.threads, [&](int i) {
        const Image& img = data_.images[image_indices[i]];
        const ModalityStack s = build_modality_stack(img, preds[i]);
        FeatureMap isolated(s.stacked.channels(), s.stacked.rows(),
                            s.stacked.cols());
        const std::size_t plane = s.stacked.plane_size();
        std::copy(s.stacked.data() + block * 3 * plane,
                  s.stacked.data() + (block * 3 + 3) * plane,
                  isolated.data() + block * 3 * plane);
        DetectorOutput out{detector_.grid(), detector_.forward(isolated)};
        float m = 0.0f;
        for (int gr = 0; gr < out.grid; ++gr)
            for (int gc = 0; gc < out.grid; ++gc)
                m = std::max(m, out.objectness(gr, gc));
        conf[i] = m;
    });
    double sum = 0.0;
    for (double c : conf) sum += c;
    return conf.empty() ? 0.0 : sum / static_cast<double>(conf.size());
}

double TrainOrchestrator::policy_update(const std::vector<Transition>& batch) {
    if (batch.empty()) throw DomainError("policy_update: empty batch");
    const int n = static_cast<int>(batch.size());

    struct SampleResult {
        GradVec grads;
        double loss = 0.0;
    };
    std::vector<SampleResult> results(batch.size());
    const auto tensors = predictor_.tensors();

    parallel_for(n, cfg_.threads, [&](int i) {
        const Transition& t = batch[i];
        const double bootstrap = t.terminal ? 0.0 : value_baseline_;
        const double w = t.reward + cfg_.discount * bootstrap;

        PredictorNet::Acts acts;
        const FeatureMap input = rgb_stack(data_.images[t.image_index]);
        const auto raw = predictor_.forward(input, &acts);
        const auto clamped = clamp_predictions(raw).as_array();

        std::array<float, 7> dout{};
        double mse = 0.0;
        for (int k = 0; k < 7; ++k) {
            const double err = clamped[k] - t.child_action[k];
            mse += err * err;
            // Clamping is a straight-through identity for the gradient.
            dout[k] = static_cast<float>(w * 2.0 * err / (7.0 * n));
        }
        results[i].loss = w * mse / 7.0;
        results[i].grads = make_grads(tensors);
        predictor_.backward(acts, dout, results[i].grads);
    });

    GradVec total = make_grads(tensors);
    double loss = 0.0;
    for (const auto& r : results) {
        accumulate(total, r.grads);
        loss += r.loss;
    }
    loss /= n;
    if (!std::isfinite(loss))
        throw TrainingError("policy_update: non-finite loss over batch of " +
                            std::to_string(n));
    predictor_opt_.step(tensors, total);

    double mean_reward = 0.0;
    for (const auto& t : batch) mean_reward += t.reward;
    mean_reward /= n;
    value_baseline_ = 0.9 * value_baseline_ + 0.1 * mean_reward;
    return loss;
}

EpisodeReport TrainOrchestrator::train_hold_step() {
    ++round_;
    EpisodeReport report;
    report.round = round_;

    const int n = static_cast<int>(data_.images.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int i = n - 1; i > 0; --i)
        std::swap(order[i],
                  order[uniform_below(rng_, static_cast<std::uint32_t>(i + 1))]);

    // Phase 1: the predictor acts on every image of the episode. Stacks are
    // kept for the detector epoch; digests and actions become transitions
    // once the reward is known.
    std::vector<PredictionTuples> actions(n);
    std::vector<FeatureMap> stacks(n);
    std::vector<std::array<float, kDigestSize>> digests(n);
    std::vector<std::uint32_t> noise_seeds(n);
    for (int i = 0; i < n; ++i)
        noise_seeds[i] = derive_seed(cfg_.seed,
                                     (static_cast<std::uint64_t>(round_) << 32) |
                                         static_cast<std::uint32_t>(i));

    // Emission runs in chunks bounded by the next sampling-frequency
    // multiple, so a replay update lands exactly on its step count and the
    // actions emitted afterwards already see the updated policy.
    int emitted = 0;
    while (emitted < n) {
        const long to_next = cfg_.sampling_frequency -
                             predictor_steps_ % cfg_.sampling_frequency;
        const int chunk = static_cast<int>(
            std::min<long>(n - emitted, to_next));
        parallel_for(chunk, cfg_.threads, [&](int ci) {
            const int i = emitted + ci;
            const int img_idx = order[i];
            const Image& img = data_.images[img_idx];
            const auto raw = predictor_.forward(rgb_stack(img));
            std::array<float, 7> noisy = raw;
            if (cfg_.exploration_noise > 0.0f) {
                Rng nrng(noise_seeds[i]);
                for (auto& v : noisy)
                    v += static_cast<float>(gaussian(nrng) * cfg_.exploration_noise);
            }
            actions[i] = clamp_predictions(noisy);
            stacks[i] = detector_input(img, actions[i], nullptr);
            digests[i] = state_digest(
                img, stacks[i], running_detector_loss_, running_reward_,
                static_cast<float>(i) / static_cast<float>(n));
        });
        for (int ci = 0; ci < chunk; ++ci) {
            ++predictor_steps_;
            log(TrainEvent::PredictorStep);
        }
        emitted += chunk;
        // Replay fires exactly at step multiples of the sampling frequency,
        // drawing on past episodes only.
        if (predictor_steps_ % cfg_.sampling_frequency == 0) {
            const auto batch =
                buffer_.sample(static_cast<std::size_t>(cfg_.replay_batch));
            if (batch) {
                last_replay_loss_ = policy_update(*batch);
                ++report.replay_updates;
                ++replay_updates_total_;
                log(TrainEvent::ReplayUpdate);
            }
        }
    }

    // Phase 2: HOLD. One supervised detector epoch over this episode's
    // stacks. A failure here aborts the round before anything is pushed.
    log(TrainEvent::HoldBegin);
    const auto det_tensors = detector_.tensors();
    double det_loss_sum = 0.0;
    std::vector<double> confidences(n, 0.0);
    for (int start = 0; start < n; start += cfg_.detector_batch) {
        const int bn = std::min(cfg_.detector_batch, n - start);
        struct BatchSlot {
            GradVec grads;
            double loss = 0.0;
            double confidence = 0.0;
        };
        std::vector<BatchSlot> slots(bn);
        parallel_for(bn, cfg_.threads, [&](int bi) {
            const int i = start + bi;
            const int img_idx = order[i];
            DetectorNet::Acts acts;
            const std::uint32_t drop_seed = derive_seed(
                cfg_.seed, 0xD0000000ull + (static_cast<std::uint64_t>(round_) << 24) +
                               static_cast<std::uint32_t>(i));
            FeatureMap raw = detector_.forward(stacks[i], &acts, true, drop_seed);
            DetectorOutput out{detector_.grid(), std::move(raw)};
            const auto lr = detection_loss(out, data_.boxes[img_idx]);
            slots[bi].loss = lr.loss;
            slots[bi].confidence = lr.mean_confidence;
            slots[bi].grads = make_grads(det_tensors);
            FeatureMap up = lr.grad;
            for (auto& v : up.flat()) v /= static_cast<float>(bn);
            detector_.backward(acts, up, slots[bi].grads);
        });
        GradVec total = make_grads(det_tensors);
        for (int bi = 0; bi < bn; ++bi) {
            accumulate(total, slots[bi].grads);
            det_loss_sum += slots[bi].loss;
            confidences[start + bi] = slots[bi].confidence;
        }
        if (!std::isfinite(det_loss_sum))
            throw TrainingError("detector epoch: non-finite loss at round " +
                                std::to_string(round_));
        detector_opt_.step(det_tensors, total);
        log(TrainEvent::DetectorStep);
    }
    log(TrainEvent::HoldEnd);
    report.detector_loss = det_loss_sum / n;
    running_detector_loss_ = static_cast<float>(report.detector_loss);

    // Phase 3: parent score is the epoch's mean detection confidence; child
    // scores come from single-modality evaluation on the episode's first
    // on-policy batch.
    double parent = 0.0;
    for (double c : confidences) parent += c;
    parent /= n;

    const int n_eval = std::min(cfg_.onpolicy_batch, n);
    std::vector<int> eval_indices(order.begin(), order.begin() + n_eval);
    std::vector<PredictionTuples> eval_preds(actions.begin(),
                                             actions.begin() + n_eval);
    double child_tl = parent, child_dt = parent;
    if (cfg_.stem_enabled) {
        child_tl = modality_confidence(eval_indices, eval_preds, 0);
        child_dt = modality_confidence(eval_indices, eval_preds, 1);
    }

    ActionRecord record;
    record.parent_score = clamp01(static_cast<float>(parent));
    record.child_thermal_score = clamp01(static_cast<float>(child_tl));
    record.child_dark_score = clamp01(static_cast<float>(child_dt));
    record.weights = weights_;
    const double reward = aggregate_reward(record);
    log(TrainEvent::RewardAggregated);
    report.parent_score = record.parent_score;
    report.child_thermal_score = record.child_thermal_score;
    report.child_dark_score = record.child_dark_score;
    report.reward = reward;
    running_reward_ = static_cast<float>(reward);

    // Phase 4: transitions are completed with the shared reward and pushed.
    std::vector<Transition> fresh(n);
    for (int i = 0; i < n; ++i) {
        Transition& t = fresh[i];
        t.state_digest = digests[i];
        t.child_action = actions[i].as_array();
        t.reward = static_cast<float>(reward);
        t.next_state_digest = digests[(i + 1) % n];
        t.terminal = i == n - 1;
        t.image_index = order[i];
        buffer_.push(t);
        log(TrainEvent::TransitionPushed);
    }

    // Phase 5: on-policy updates over the fresh transitions, then control
    // returns to the predictor for the next round.
    double ponpolicy = 0.0;
    int updates = 0;
    for (int start = 0; start + cfg_.onpolicy_batch <= n;
         start += cfg_.onpolicy_batch) {
        const std::vector<Transition> batch(fresh.begin() + start,
                                            fresh.begin() + start +
                                                cfg_.onpolicy_batch);
        ponpolicy += policy_update(batch);
        ++updates;
        log(TrainEvent::OnPolicyUpdate);
    }
    if (updates == 0) { // tiny datasets: one batch of everything
        ponpolicy = policy_update(fresh);
        updates = 1;
        log(TrainEvent::OnPolicyUpdate);
    }
    report.predictor_loss = ponpolicy / updates;
    report.onpolicy_updates = updates;
    report.predictor_steps = predictor_steps_;
    return report;
}

} // namespace spiralx
