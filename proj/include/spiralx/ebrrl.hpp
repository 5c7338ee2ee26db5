#ifndef SPIRALX_EBRRL_HPP
#define SPIRALX_EBRRL_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "spiralx/nets.hpp"
#include "spiralx/rng.hpp"
#include "spiralx/stem.hpp"
#include "spiralx/tensor.hpp"

namespace spiralx {

// ---------------------------------------------------------------------------
// Reward aggregation
// ---------------------------------------------------------------------------

/// Parent/child reward weights. The defaults are the framework's fixed
/// split: 0.4 for the detector's action, 0.3 for each child modality.
struct RewardWeights {
    double parent = 0.4;
    double child_thermal = 0.3;
    double child_dark = 0.3;

    /// Weights must be non-negative and sum to 1.
    void validate() const;
};

struct ActionRecord {
    double parent_score = 0.0;        // normalized detection confidence
    double child_thermal_score = 0.0; // thermal-only detection confidence
    double child_dark_score = 0.0;    // dark-only detection confidence
    RewardWeights weights;
};

/// Weighted sum of the three scores. Scores outside [0,1] are rejected.
double aggregate_reward(const ActionRecord& a);

/// Sum of gamma^k * r_k.
double discounted_return(const std::vector<double>& rewards, double gamma);

// ---------------------------------------------------------------------------
// Replay buffer
// ---------------------------------------------------------------------------

constexpr int kDigestSize = 16;

struct Transition {
    std::array<float, kDigestSize> state_digest{};
    std::array<float, 7> child_action{};
    float reward = 0.0f;
    std::array<float, kDigestSize> next_state_digest{};
    bool terminal = false;
    /// Index of the source image in the training set, so replay updates can
    /// re-run the policy on the stored state.
    int image_index = 0;
};

class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 10000, std::uint32_t seed = 0);

    void push(const Transition& t);
    std::size_t size() const { return full_ ? capacity_ : head_; }
    std::size_t capacity() const { return capacity_; }

    /// i = 0 is the oldest stored transition.
    const Transition& at(std::size_t i) const;

    /// Uniform sample without replacement; nullopt while the buffer holds
    /// fewer than n transitions (the caller skips the update).
    std::optional<std::vector<Transition>> sample(std::size_t n);

    /// Empirical transition frequencies between digest buckets: the first
    /// digest component is quantized into `levels` bins and (from, to) pairs
    /// are counted. Bookkeeping only; nothing plans over these counts.
    std::map<std::pair<int, int>, int> transition_counts(int levels) const;

private:
    std::size_t capacity_;
    std::vector<Transition> ring_;
    std::size_t head_ = 0;
    bool full_ = false;
    Rng rng_;
};

/// Compressed RL state: classical image statistics, varied-modality
/// statistics, and two running training signals plus episode progress.
std::array<float, kDigestSize> state_digest(const Image& rgb,
                                            const FeatureMap& stack,
                                            float running_detector_loss,
                                            float running_reward,
                                            float episode_progress);

// ---------------------------------------------------------------------------
// Train-hold orchestration
// ---------------------------------------------------------------------------

struct TrainingSet {
    std::vector<Image> images;
    std::vector<GroundTruthSet> boxes; // normalized to [0,1] image units
};

struct OrchestratorConfig {
    double discount = 0.6;
    std::size_t buffer_capacity = 10000;
    long sampling_frequency = 1000; // predictor steps per replay update
    int replay_batch = 64;
    int onpolicy_batch = 32;
    int detector_batch = 8;
    float predictor_lr = 0.001f;
    float detector_lr = 0.001f;
    float exploration_noise = 0.1f;
    bool stem_enabled = true;
    int threads = 1;
    std::uint32_t seed = 0;
};

struct EpisodeReport {
    int round = 0;
    long predictor_steps = 0;
    double predictor_loss = 0.0;
    double detector_loss = 0.0;
    double parent_score = 0.0;
    double child_thermal_score = 0.0;
    double child_dark_score = 0.0;
    double reward = 0.0;
    int onpolicy_updates = 0;
    int replay_updates = 0;
};

enum class TrainEvent {
    PredictorStep,
    ReplayUpdate,
    HoldBegin,
    DetectorStep,
    HoldEnd,
    RewardAggregated,
    TransitionPushed,
    OnPolicyUpdate,
};

struct EventLogEntry {
    TrainEvent event;
    long predictor_step;
    int round;
};

/// Runs the alternating schedule: the predictor acts over the episode,
/// holds while the detector trains one supervised epoch, receives the
/// aggregated reward, then updates from fresh and replayed transitions.
class TrainOrchestrator {
public:
    TrainOrchestrator(PredictorNet& predictor, DetectorNet& detector,
                      const TrainingSet& data, const OrchestratorConfig& cfg);

    EpisodeReport train_hold_step();

    ReplayBuffer& buffer() { return buffer_; }
    const std::vector<EventLogEntry>& event_log() const { return event_log_; }
    long predictor_steps() const { return predictor_steps_; }
    RewardWeights& weights() { return weights_; }

    /// Reward-weighted regression on a batch of stored transitions: MSE
    /// between the policy's current output for each stored state and the
    /// stored action, each sample weighted by reward + gamma * bootstrap.
    /// One Adam step; returns the scalar loss.
    double policy_update(const std::vector<Transition>& batch);

private:
    FeatureMap detector_input(const Image& img, const PredictionTuples& preds,
                              ModalityStack* stack_out) const;
    double modality_confidence(const std::vector<int>& image_indices,
                               const std::vector<PredictionTuples>& preds,
                               int block) const;
    void log(TrainEvent e);

    PredictorNet& predictor_;
    DetectorNet& detector_;
    const TrainingSet& data_;
    OrchestratorConfig cfg_;
    RewardWeights weights_;
    ReplayBuffer buffer_;
    AdamOptimizer predictor_opt_;
    AdamOptimizer detector_opt_;
    Rng rng_;
    std::vector<EventLogEntry> event_log_;
    long predictor_steps_ = 0;
    int round_ = 0;
    int replay_updates_total_ = 0;
    float running_detector_loss_ = 0.0f;
    float running_reward_ = 0.0f;
    double value_baseline_ = 0.0; // running mean reward, bootstrap estimate
    double last_replay_loss_ = 0.0;
};

} // namespace spiralx

#endif
