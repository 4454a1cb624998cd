#pragma once

#include "sfegacn/dataset.hpp"
#include "sfegacn/nn.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sfegacn {

/// How generator inputs are drawn. SidePlusNoise feeds the generator a
/// uniformly drawn side row plus unit Gaussian noise instead of pure noise;
/// it exists to stress the cooperative supervision in benchmarks, where
/// starting generation on top of the side category makes drift most likely.
enum class NoiseMode { Gaussian, SidePlusNoise };

std::string noise_mode_name(NoiseMode mode);
NoiseMode noise_mode_from_name(const std::string& name);

struct GacnConfig {
    std::string target_label;
    std::size_t disc_epochs = 1;      // discriminator epochs per iteration (k)
    std::size_t backup_cycle = 10;    // iterations between generator backups
    std::size_t rollback_window = 20; // iterations the score gets to drop (e_r)
    double rollback_coeff = 0.5;      // interpolation weight toward the backup (c_r)
    double drop_tolerance = 0.01;     // minimum required drop; +inf disables rollback
    std::size_t iterations = 500;
    std::size_t noise_dim = 8;
    std::size_t batch_size = 32;
    double learning_rate = 0.05;
    std::uint64_t seed = 0;
    NoiseMode noise_mode = NoiseMode::Gaussian;
    std::vector<std::size_t> gen_hidden = {16, 16};
    std::vector<std::size_t> disc_hidden = {16};

    void validate() const;
};

struct IterationRecord {
    std::size_t iteration = 0; // 1-based
    double mean_dcoo = 0.0;
    double min_dcoo = 0.0;
    double max_dcoo = 0.0;
    bool rollback = false;
};

/// The three nets plus the generator's standby snapshot and the per-iteration
/// score history. `side_rows` is only kept for SidePlusNoise models so that
/// post-training generation can reproduce the training input distribution.
struct GacnModels {
    DenseNet generator;
    DenseNet d_adv;
    DenseNet d_coo;
    ParamSnapshot backup;
    std::vector<IterationRecord> history;
    std::string target_label;
    std::size_t data_dim = 0;
    std::size_t noise_dim = 0;
    NoiseMode noise_mode = NoiseMode::Gaussian;
    Matrix side_rows;
};

/// Optional observation points used by tests and the affinity evaluation.
struct TrainHooks {
    /// Called once per iteration with the generated batch whose cooperative
    /// score was just recorded.
    std::function<void(std::size_t iteration, const Matrix& fake)> on_scored;
    /// Called on every rollback with the standby snapshot and the generator
    /// parameters immediately before and after the interpolation.
    std::function<void(std::size_t iteration, const ParamSnapshot& backup,
                       const ParamSnapshot& before, const ParamSnapshot& after)>
        on_rollback;
    /// Test seam: replaces the recorded cooperative mean before it reaches
    /// the history and the rollback decision, so scripted score sequences
    /// can drive the trigger deterministically.
    std::function<double(std::size_t iteration, double recorded_mean)> override_recorded_mean;
};

/// The rollback check is armed only while generated samples still carry side
/// character: recorded mean at or above this level. Below it the generator
/// has left the side category and trains unhindered.
inline constexpr double kRollbackArmLevel = 0.42;

/// True when the recorded cooperative scores call for a generator rollback:
/// over the trailing `window` records the score never dropped more than
/// `tolerance` below the record just before that window. Needs window + 1
/// records; a non-finite tolerance disables the check.
bool rollback_due(const std::vector<double>& recorded_means, std::size_t window, double tolerance);

/// Trains the generator against the adversarial discriminator while the
/// cooperative discriminator watches for drift toward the side categories.
/// Per iteration: disc_epochs of discriminator training (adversarial on
/// target-vs-fake, cooperative on side-vs-fake), one recorded cooperative
/// score on a fresh generated batch, a generator backup every backup_cycle
/// iterations, a rollback (interpolation toward the backup plus cooperative
/// retraining) when the score stalls while still at or above
/// kRollbackArmLevel, and one generator step on the adversarial objective.
///
/// All randomness flows through streams derived from cfg.seed; the noise
/// sources for discriminator training, score recording, rollback retraining
/// and the generator step are independent, so a rollback never perturbs the
/// generator's own sample sequence.
GacnModels train_gacn(const EmbeddedSet& embedded, const GacnConfig& cfg,
                      const TrainHooks* hooks = nullptr);

/// n generated rows, deterministic under seed. n = 0 yields an empty matrix.
Matrix generate(const GacnModels& models, std::size_t n, std::uint64_t seed);

struct LabelCount {
    std::string label;
    std::size_t count = 0;
};

/// Per-label augmentation: trains one GACN per requested label (side = every
/// other label) and appends the generated rows, tagged with the label and the
/// generated flag. Seeds are derived per label from base_cfg.seed. Requesting
/// an absent label throws ConfigError; zero counts leave the set unchanged.
EmbeddedSet augment_all(const EmbeddedSet& embedded, const std::vector<LabelCount>& counts,
                        const GacnConfig& base_cfg);

struct EvalConfig {
    std::vector<std::size_t> hidden = {16};
    TrainConfig train;
};

struct AffinityEpoch {
    double min = 0.0;
    double mean = 0.0;
    double max = 0.0;
};

/// Per-batch score statistics from a side-affinity evaluator, plus the first
/// 1-based epoch whose mean fell below 0.5 (absent when none did).
struct AffinityReport {
    std::vector<AffinityEpoch> epochs;
    std::optional<std::size_t> converged_epoch;
};

/// Pre-trains a binary evaluator on the real data (target label -> 0, side
/// labels -> 1), then scores each generated batch. Mean scores below 0.5
/// mean the batch does not incline toward the side categories.
AffinityReport eval_side_affinity(const EmbeddedSet& embedded, const std::string& target_label,
                                  const std::vector<Matrix>& generated_batches,
                                  const EvalConfig& cfg);

/// CSV export: iteration,mean_dcoo,min,max,rollback_flag.
void write_history_csv(const std::filesystem::path& path,
                       const std::vector<IterationRecord>& history);

/// CSV export: epoch,min,mean,max.
void write_affinity_csv(const std::filesystem::path& path, const AffinityReport& report);

} // namespace sfegacn
