#include "sfegacn/gacn.hpp"

#include "sfegacn/error.hpp"
#include "sfegacn/log.hpp"
#include "sfegacn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "sfegacn/config_text.hpp"

namespace sfegacn {

namespace {

constexpr double kLogFloor = 1e-12;

/// Generator input source; owns its stream so the four noise purposes stay
/// independent.
class NoiseSource {
public:
    NoiseSource(NoiseMode mode, std::size_t noise_dim, const Matrix* side, std::uint64_t seed)
        : mode_(mode), noise_dim_(noise_dim), side_(side), rng_(seed) {}

    Matrix batch(std::size_t n) {
        Matrix z(n, noise_dim_);
        for (std::size_t r = 0; r < n; ++r) {
            if (mode_ == NoiseMode::SidePlusNoise) {
                const std::size_t pick = rng_.uniform_index(side_->rows());
                for (std::size_t c = 0; c < noise_dim_; ++c)
                    z(r, c) = (*side_)(pick, c) + rng_.normal();
            } else {
                for (std::size_t c = 0; c < noise_dim_; ++c) z(r, c) = rng_.normal();
            }
        }
        return z;
    }

private:
    NoiseMode mode_;
    std::size_t noise_dim_;
    const Matrix* side_;
    RngStream rng_;
};

/// Uniform row sampler with replacement (batch size may exceed the pool).
class RowSampler {
public:
    RowSampler(const Matrix& data, std::vector<std::size_t> pool, std::uint64_t seed)
        : data_(data), pool_(std::move(pool)), rng_(seed) {}

    Matrix batch(std::size_t n) {
        Matrix out(n, data_.cols());
        for (std::size_t r = 0; r < n; ++r)
            out.set_row(r, data_.row(pool_[rng_.uniform_index(pool_.size())]));
        return out;
    }

private:
    const Matrix& data_;
    std::vector<std::size_t> pool_;
    RngStream rng_;
};

DenseNet make_discriminator(std::size_t data_dim, const std::vector<std::size_t>& hidden,
                            std::uint64_t seed) {
    std::vector<std::size_t> dims{data_dim};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(1);
    std::vector<Activation> acts(hidden.size(), Activation::Relu);
    acts.push_back(Activation::Sigmoid);
    return DenseNet(dims, acts, seed);
}

DenseNet make_generator(std::size_t noise_dim, std::size_t data_dim,
                        const std::vector<std::size_t>& hidden, std::uint64_t seed) {
    std::vector<std::size_t> dims{noise_dim};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(data_dim);
    std::vector<Activation> acts(hidden.size(), Activation::Relu);
    acts.push_back(Activation::Linear);
    return DenseNet(dims, acts, seed);
}

/// One discriminator step on positives (-> 1) stacked over negatives (-> 0).
void train_disc(DenseNet& disc, const Matrix& positives, const Matrix& negatives, double lr) {
    Matrix batch = positives;
    batch.append_rows(negatives);
    Matrix targets(batch.rows(), 1);
    for (std::size_t r = 0; r < positives.rows(); ++r) targets(r, 0) = 1.0;
    sgd_step(disc, batch, targets, lr);
}

/// Non-saturating generator update: one SGD step on -mean(log D_adv(G(z))),
/// back-propagated through the discriminator without touching its weights.
void generator_step(DenseNet& generator, const DenseNet& d_adv, const Matrix& z, double lr,
                    std::size_t iteration) {
    ForwardTrace gen_trace = forward_trace(generator, z);
    ForwardTrace disc_trace = forward_trace(d_adv, gen_trace.output());
    const Matrix& p = disc_trace.output();

    const double n = static_cast<double>(p.rows());
    Matrix grad(p.rows(), 1);
    double loss = 0.0;
    for (std::size_t r = 0; r < p.rows(); ++r) {
        const double pr = std::max(p(r, 0), kLogFloor);
        loss -= std::log(pr) / n;
        // d(-log sigmoid(a))/da = sigmoid(a) - 1
        grad(r, 0) = (p(r, 0) - 1.0) / n;
    }
    if (!std::isfinite(loss))
        throw NumericError("gacn: non-finite generator loss at iteration " +
                           std::to_string(iteration));

    const Gradients disc_grads = backward(d_adv, disc_trace, grad);
    // The generator's output layer is linear, so the discriminator's input
    // gradient is already the generator's last pre-activation gradient.
    apply_sgd(generator, backward(generator, gen_trace, disc_grads.input_grad), lr);
}

} // namespace

std::string noise_mode_name(NoiseMode mode) {
    return mode == NoiseMode::SidePlusNoise ? "side-plus-noise" : "gaussian";
}

NoiseMode noise_mode_from_name(const std::string& name) {
    if (name == "gaussian") return NoiseMode::Gaussian;
    if (name == "side-plus-noise") return NoiseMode::SidePlusNoise;
    throw ConfigError("unknown noise mode: " + name);
}

void GacnConfig::validate() const {
    if (disc_epochs == 0) throw ConfigError("gacn: disc_epochs must be at least 1");
    if (backup_cycle == 0) throw ConfigError("gacn: backup_cycle must be at least 1");
    if (rollback_window == 0) throw ConfigError("gacn: rollback_window must be at least 1");
    if (!(rollback_coeff >= 0.0 && rollback_coeff <= 1.0))
        throw ConfigError("gacn: rollback_coeff must lie in [0,1]");
    if (std::isfinite(drop_tolerance) && drop_tolerance < 0.0)
        throw ConfigError("gacn: drop_tolerance must be non-negative");
    if (noise_dim == 0) throw ConfigError("gacn: noise_dim must be positive");
    if (batch_size == 0) throw ConfigError("gacn: batch_size must be positive");
    if (!(learning_rate > 0.0)) throw ConfigError("gacn: learning_rate must be positive");
}

bool rollback_due(const std::vector<double>& recorded_means, std::size_t window, double tolerance) {
    if (!std::isfinite(tolerance)) return false;
    if (recorded_means.size() < window + 1) return false;
    const std::size_t n = recorded_means.size();
    const double reference = recorded_means[n - 1 - window];
    double lowest = recorded_means[n - window];
    for (std::size_t i = n - window; i < n; ++i) lowest = std::min(lowest, recorded_means[i]);
    return reference - lowest <= tolerance;
}

GacnModels train_gacn(const EmbeddedSet& embedded, const GacnConfig& cfg, const TrainHooks* hooks) {
    cfg.validate();
    const auto target_rows = embedded.rows_with_label(cfg.target_label);
    const auto side_rows = embedded.rows_with_other_label(cfg.target_label);
    if (target_rows.empty())
        throw ConfigError("gacn: no rows labelled '" + cfg.target_label + "'");
    if (side_rows.empty())
        throw ConfigError("gacn: no side rows (rows with labels other than '" + cfg.target_label +
                          "')");

    const std::size_t data_dim = embedded.dim();
    const Matrix side_matrix = embedded.matrix.gather_rows(side_rows);
    const std::size_t noise_dim =
        cfg.noise_mode == NoiseMode::SidePlusNoise ? data_dim : cfg.noise_dim;

    GacnModels models;
    models.target_label = cfg.target_label;
    models.data_dim = data_dim;
    models.noise_dim = noise_dim;
    models.noise_mode = cfg.noise_mode;
    if (cfg.noise_mode == NoiseMode::SidePlusNoise) models.side_rows = side_matrix;

    models.generator =
        make_generator(noise_dim, data_dim, cfg.gen_hidden, derive_seed(cfg.seed, "gacn:init:G"));
    models.d_adv =
        make_discriminator(data_dim, cfg.disc_hidden, derive_seed(cfg.seed, "gacn:init:Dadv"));
    models.d_coo =
        make_discriminator(data_dim, cfg.disc_hidden, derive_seed(cfg.seed, "gacn:init:Dcoo"));
    models.backup = snapshot(models.generator);

    const Matrix* side_for_noise = &side_matrix;
    NoiseSource z1(cfg.noise_mode, noise_dim, side_for_noise, derive_seed(cfg.seed, "gacn:Z1"));
    NoiseSource z2(cfg.noise_mode, noise_dim, side_for_noise, derive_seed(cfg.seed, "gacn:Z2"));
    NoiseSource z3(cfg.noise_mode, noise_dim, side_for_noise, derive_seed(cfg.seed, "gacn:Z3"));
    NoiseSource z4(cfg.noise_mode, noise_dim, side_for_noise, derive_seed(cfg.seed, "gacn:Z4"));
    RowSampler real_sampler(embedded.matrix, target_rows, derive_seed(cfg.seed, "gacn:sample:real"));
    RowSampler side_sampler(embedded.matrix, side_rows, derive_seed(cfg.seed, "gacn:sample:side"));
    RowSampler rollback_side_sampler(embedded.matrix, side_rows,
                                     derive_seed(cfg.seed, "gacn:sample:side-rollback"));

    std::vector<double> recorded_means;
    recorded_means.reserve(cfg.iterations);
    models.history.reserve(cfg.iterations);

    for (std::size_t it = 1; it <= cfg.iterations; ++it) {
        for (std::size_t epoch = 0; epoch < cfg.disc_epochs; ++epoch) {
            const Matrix fake = models.generator.forward(z1.batch(cfg.batch_size));
            train_disc(models.d_adv, real_sampler.batch(cfg.batch_size), fake, cfg.learning_rate);
            train_disc(models.d_coo, side_sampler.batch(cfg.batch_size), fake, cfg.learning_rate);
        }

        const Matrix scored_fake = models.generator.forward(z2.batch(cfg.batch_size));
        const Matrix scores = models.d_coo.forward(scored_fake);
        IterationRecord record;
        record.iteration = it;
        record.min_dcoo = scores(0, 0);
        record.max_dcoo = scores(0, 0);
        double sum = 0.0;
        for (std::size_t r = 0; r < scores.rows(); ++r) {
            const double s = scores(r, 0);
            sum += s;
            record.min_dcoo = std::min(record.min_dcoo, s);
            record.max_dcoo = std::max(record.max_dcoo, s);
        }
        record.mean_dcoo = sum / static_cast<double>(scores.rows());
        if (hooks != nullptr && hooks->override_recorded_mean)
            record.mean_dcoo = hooks->override_recorded_mean(it, record.mean_dcoo);
        if (!std::isfinite(record.mean_dcoo))
            throw NumericError("gacn: non-finite cooperative score at iteration " +
                               std::to_string(it));
        recorded_means.push_back(record.mean_dcoo);
        if (hooks != nullptr && hooks->on_scored) hooks->on_scored(it, scored_fake);

        if (it % cfg.backup_cycle == 0) models.backup = snapshot(models.generator);

        // The stall check is armed only while generated samples still show
        // side character; once they no longer do, the generator trains
        // unhindered. Without the gate the check would also fire on the
        // floor, where the score cannot drop any further, and pin the
        // generator there.
        if (record.mean_dcoo >= kRollbackArmLevel &&
            rollback_due(recorded_means, cfg.rollback_window, cfg.drop_tolerance)) {
            record.rollback = true;
            const ParamSnapshot before = snapshot(models.generator);
            const ParamSnapshot after =
                interpolate_params(models.backup, before, cfg.rollback_coeff);
            restore(models.generator, after);
            if (hooks != nullptr && hooks->on_rollback)
                hooks->on_rollback(it, models.backup, before, after);

            // Cooperative retraining compensates for the rollback; never
            // skipped even when the cycle position works out to zero epochs.
            std::size_t retrain_epochs = it % cfg.backup_cycle;
            if (retrain_epochs == 0) retrain_epochs = 1;
            for (std::size_t epoch = 0; epoch < retrain_epochs; ++epoch) {
                const Matrix fresh_fake = models.generator.forward(z3.batch(cfg.batch_size));
                train_disc(models.d_coo, rollback_side_sampler.batch(cfg.batch_size), fresh_fake,
                           cfg.learning_rate);
            }
        }

        generator_step(models.generator, models.d_adv, z4.batch(cfg.batch_size),
                       cfg.learning_rate, it);
        models.history.push_back(record);
    }
    return models;
}

Matrix generate(const GacnModels& models, std::size_t n, std::uint64_t seed) {
    if (n == 0) return Matrix(0, models.data_dim);
    const Matrix* side = models.noise_mode == NoiseMode::SidePlusNoise ? &models.side_rows : nullptr;
    NoiseSource source(models.noise_mode, models.noise_dim, side,
                       derive_seed(seed, "gacn:generate"));
    return models.generator.forward(source.batch(n));
}

EmbeddedSet augment_all(const EmbeddedSet& embedded, const std::vector<LabelCount>& counts,
                        const GacnConfig& base_cfg) {
    for (const auto& [label, count] : counts) {
        (void)count;
        if (embedded.rows_with_label(label).empty())
            throw ConfigError("augment: no rows labelled '" + label + "'");
    }

    EmbeddedSet out = embedded;
    for (const auto& [label, count] : counts) {
        if (count == 0) continue;
        GacnConfig cfg = base_cfg;
        cfg.target_label = label;
        cfg.seed = derive_seed(base_cfg.seed, "augment:train:" + label);
        log::info("augment: training generator for label '" + label + "'");
        const GacnModels models = train_gacn(embedded, cfg);
        const Matrix rows = generate(models, count, derive_seed(base_cfg.seed, "augment:gen:" + label));
        for (std::size_t r = 0; r < rows.rows(); ++r) out.append_row(rows.row(r), label, true);
    }
    return out;
}

AffinityReport eval_side_affinity(const EmbeddedSet& embedded, const std::string& target_label,
                                  const std::vector<Matrix>& generated_batches,
                                  const EvalConfig& cfg) {
    cfg.train.validate();
    const auto target_rows = embedded.rows_with_label(target_label);
    const auto side_rows = embedded.rows_with_other_label(target_label);
    if (target_rows.empty() || side_rows.empty())
        throw ConfigError("affinity evaluator needs both target and side rows");

    // Evaluator: target -> 0, side -> 1.
    Matrix train_x = embedded.matrix.gather_rows(target_rows);
    train_x.append_rows(embedded.matrix.gather_rows(side_rows));
    Matrix train_y(train_x.rows(), 1);
    for (std::size_t r = target_rows.size(); r < train_x.rows(); ++r) train_y(r, 0) = 1.0;

    DenseNet evaluator = [&] {
        std::vector<std::size_t> dims{embedded.dim()};
        dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
        dims.push_back(1);
        std::vector<Activation> acts(cfg.hidden.size(), Activation::Relu);
        acts.push_back(Activation::Sigmoid);
        return DenseNet(dims, acts, derive_seed(cfg.train.seed, "affinity:init"));
    }();

    RngStream shuffler(derive_seed(cfg.train.seed, "affinity:shuffle"));
    std::vector<std::size_t> ordering(train_x.rows());
    for (std::size_t i = 0; i < ordering.size(); ++i) ordering[i] = i;
    for (std::size_t epoch = 0; epoch < cfg.train.epochs; ++epoch) {
        shuffler.shuffle(ordering);
        for (std::size_t begin = 0; begin < ordering.size(); begin += cfg.train.batch_size) {
            const std::size_t end = std::min(begin + cfg.train.batch_size, ordering.size());
            const std::vector<std::size_t> rows(ordering.begin() + static_cast<std::ptrdiff_t>(begin),
                                                ordering.begin() + static_cast<std::ptrdiff_t>(end));
            sgd_step(evaluator, train_x.gather_rows(rows), train_y.gather_rows(rows),
                     cfg.train.learning_rate);
        }
    }

    AffinityReport report;
    report.epochs.reserve(generated_batches.size());
    for (std::size_t i = 0; i < generated_batches.size(); ++i) {
        const Matrix scores = evaluator.forward(generated_batches[i]);
        AffinityEpoch epoch;
        epoch.min = scores(0, 0);
        epoch.max = scores(0, 0);
        double sum = 0.0;
        for (std::size_t r = 0; r < scores.rows(); ++r) {
            sum += scores(r, 0);
            epoch.min = std::min(epoch.min, scores(r, 0));
            epoch.max = std::max(epoch.max, scores(r, 0));
        }
        epoch.mean = sum / static_cast<double>(scores.rows());
        report.epochs.push_back(epoch);
        if (!report.converged_epoch && epoch.mean < 0.5) report.converged_epoch = i + 1;
    }
    return report;
}

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<IterationRecord>& history) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path.string());
    out << "iteration,mean_dcoo,min,max,rollback_flag\n";
    for (const auto& r : history)
        out << r.iteration << ',' << format_double(r.mean_dcoo) << ',' << format_double(r.min_dcoo)
            << ',' << format_double(r.max_dcoo) << ',' << (r.rollback ? 1 : 0) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

void write_affinity_csv(const std::filesystem::path& path, const AffinityReport& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path.string());
    out << "epoch,min,mean,max\n";
    for (std::size_t i = 0; i < report.epochs.size(); ++i)
        out << i + 1 << ',' << format_double(report.epochs[i].min) << ','
            << format_double(report.epochs[i].mean) << ',' << format_double(report.epochs[i].max)
            << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace sfegacn
