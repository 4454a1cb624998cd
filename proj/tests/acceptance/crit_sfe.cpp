// Convergence analogue for the embedding: on a 5-class x 40-row x 8-feature
// few-shot set, a single-hidden-layer classifier trained on embedded features
// must end with a strictly lower validation loss than the same classifier on
// the raw features, averaged over 3 seeds. The embedding is pre-trained on a
// larger pool from the same traffic distribution.

#include "framework.hpp"

#include <sfegacn/classifier.hpp>
#include <sfegacn/data_io.hpp>
#include <sfegacn/rng.hpp>
#include <sfegacn/sfe.hpp>

#include <cmath>
#include <iostream>

namespace acceptance {
namespace {

using namespace sfegacn;

// Session-feature-like scales: counts, durations, byte totals.
constexpr double kBase[8] = {420, 65, 1800, 24, 950, 7, 240, 88};

SynthConfig traffic_config(std::size_t per_class, std::uint64_t seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    for (std::size_t i = 0; i < 5; ++i) {
        SynthClass cls;
        cls.label = "cat" + std::to_string(i);
        for (std::size_t j = 0; j < 8; ++j) {
            const double level = 1.0 + 0.45 * static_cast<double>((i + j) % 5);
            cls.mean.push_back(kBase[j] * level);
            cls.variance.push_back(std::pow(0.10 * kBase[j] * level, 2));
        }
        cls.count = per_class;
        cfg.classes.push_back(std::move(cls));
    }
    return cfg;
}

/// Deterministic 30/10 per-class split (synth groups rows by class).
void split_few_shot(const SessionFeatureSet& few_shot, const EmbeddedSet& space,
                    EmbeddedSet& train, EmbeddedSet& validation) {
    std::size_t index_in_class = 0;
    std::string current;
    for (std::size_t r = 0; r < few_shot.rows(); ++r) {
        if (few_shot.labels[r] != current) {
            current = few_shot.labels[r];
            index_in_class = 0;
        }
        EmbeddedSet& sink = index_in_class < 30 ? train : validation;
        sink.append_row(space.matrix.row(r), space.labels[r], false);
        ++index_in_class;
    }
}

double final_validation_loss(const EmbeddedSet& space, const SessionFeatureSet& few_shot,
                             std::uint64_t seed) {
    EmbeddedSet train, validation;
    train.matrix = Matrix(0, space.dim());
    validation.matrix = Matrix(0, space.dim());
    split_few_shot(few_shot, space, train, validation);

    TrainConfig cls;
    cls.epochs = 150;
    cls.learning_rate = 0.02;
    cls.batch_size = 16;
    cls.seed = derive_seed(seed, "sfe-analogue:classifier");
    const LabelClassifier classifier = train_label_classifier(train, {16}, cls);
    return evaluate_loss(classifier, validation);
}

void run_criterion(const Context&) {
    double embedded_sum = 0.0;
    double raw_sum = 0.0;
    for (std::uint64_t seed : {1, 2, 3}) {
        const SessionFeatureSet pool = synth_generate(traffic_config(200, seed));
        const SessionFeatureSet few_shot = synth_generate(traffic_config(40, seed + 100));

        TrainConfig embedding_cfg;
        embedding_cfg.epochs = 20;
        embedding_cfg.learning_rate = 0.3;
        embedding_cfg.batch_size = 32;
        embedding_cfg.seed = derive_seed(seed, "sfe-analogue:embedding");
        const EmbeddingModel model = train_embedding(pool, 8, 2, embedding_cfg);

        const EmbeddedSet embedded = embed(few_shot, model);
        EmbeddedSet raw;
        raw.matrix = few_shot.features;
        raw.labels = few_shot.labels;
        raw.generated.assign(few_shot.rows(), false);

        const double embedded_loss = final_validation_loss(embedded, few_shot, seed);
        const double raw_loss = final_validation_loss(raw, few_shot, seed);
        require(std::isfinite(embedded_loss) && std::isfinite(raw_loss),
                "non-finite validation loss at seed " + str(seed));
        embedded_sum += embedded_loss;
        raw_sum += raw_loss;
    }
    const double embedded_mean = embedded_sum / 3.0;
    const double raw_mean = raw_sum / 3.0;
    std::cerr << "  sfe-convergence: mean validation loss embedded = " << embedded_mean
              << ", raw = " << raw_mean << "\n";
    require(embedded_mean < raw_mean,
            "embedded validation loss " + str(embedded_mean) + " not below raw " + str(raw_mean));
}

const Register reg("sfe-convergence", run_criterion);

} // namespace
} // namespace acceptance
