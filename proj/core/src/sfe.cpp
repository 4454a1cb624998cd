#include "sfegacn/sfe.hpp"

#include "sfegacn/error.hpp"
#include "sfegacn/log.hpp"
#include "sfegacn/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace sfegacn {

namespace {

std::vector<double> extract_column(const Matrix& m, std::size_t col) {
    std::vector<double> out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) out[r] = m(r, col);
    return out;
}

std::size_t bits_for(std::int64_t value) {
    if (value <= 0) return 1;
    return static_cast<std::size_t>(std::bit_width(static_cast<std::uint64_t>(value)));
}

} // namespace

std::int64_t Quantizer::quantize(double value) const {
    return std::llround((value - offset) * scale);
}

BitWidths compute_bit_widths(const SessionFeatureSet& set) {
    if (set.rows() == 0 || set.feature_count() == 0)
        throw ConfigError("compute_bit_widths: empty feature set");
    BitWidths widths;
    widths.widths.reserve(set.feature_count());
    for (std::size_t c = 0; c < set.feature_count(); ++c) {
        double lo = set.features(0, c);
        double hi = lo;
        for (std::size_t r = 1; r < set.rows(); ++r) {
            lo = std::min(lo, set.features(r, c));
            hi = std::max(hi, set.features(r, c));
        }
        Quantizer q{lo, 1.0};
        widths.widths.push_back(bits_for(q.quantize(hi)));
    }
    return widths;
}

Matrix binarize_column(const std::vector<double>& column, const Quantizer& quantizer,
                       std::size_t width, bool clamp, std::size_t* clamped) {
    const std::int64_t max_value = width >= 63 ? INT64_MAX
                                               : (std::int64_t{1} << width) - 1;
    Matrix bits(column.size(), width);
    for (std::size_t r = 0; r < column.size(); ++r) {
        std::int64_t q = quantizer.quantize(column[r]);
        if (q < 0 || q > max_value) {
            if (!clamp)
                throw DataError("binarize: row " + std::to_string(r) + " quantizes to " +
                                std::to_string(q) + ", outside [0, " + std::to_string(max_value) +
                                "]");
            q = std::clamp<std::int64_t>(q, 0, max_value);
            if (clamped != nullptr) ++*clamped;
        }
        for (std::size_t k = 0; k < width; ++k)
            bits(r, k) = static_cast<double>((q >> (width - 1 - k)) & 1);
    }
    return bits;
}

std::int64_t decode_bits(std::span<const double> bits) {
    std::int64_t value = 0;
    for (double b : bits) value = (value << 1) | (b != 0.0 ? 1 : 0);
    return value;
}

CbowDataset build_cbow_dataset(const Matrix& bits, std::size_t window) {
    if (window == 0) throw ConfigError("build_cbow_dataset: window must be positive");
    CbowDataset out;
    const std::size_t t = bits.rows();
    if (t < 2 * window + 1) {
        out.x = Matrix(0, bits.cols());
        out.y = Matrix(0, bits.cols());
        out.short_input = true;
        return out;
    }
    const std::size_t pairs = t - 2 * window;
    out.x = Matrix(pairs, bits.cols());
    out.y = Matrix(pairs, bits.cols());
    for (std::size_t center = window; center + window < t; ++center) {
        const std::size_t k = center - window;
        for (std::size_t p = center - window; p <= center + window; ++p) {
            if (p == center) continue;
            for (std::size_t c = 0; c < bits.cols(); ++c) out.x(k, c) += bits(p, c);
        }
        out.y.set_row(k, bits.row(center));
    }
    return out;
}

EmbeddingModel train_embedding(const SessionFeatureSet& set, std::size_t embedding_dim,
                               std::size_t window, const TrainConfig& cfg, SfeTrainStats* stats) {
    if (embedding_dim == 0) throw ConfigError("train_embedding: embedding_dim must be positive");
    if (window == 0) throw ConfigError("train_embedding: window must be positive");
    cfg.validate();

    EmbeddingModel model;
    model.embedding_dim = embedding_dim;
    model.window = window;
    model.column_names = set.column_names;
    model.quantizers.reserve(set.feature_count());

    // Fit the quantizers first so bit widths and encodings agree.
    for (std::size_t c = 0; c < set.feature_count(); ++c) {
        const auto column = extract_column(set.features, c);
        if (column.empty()) throw ConfigError("train_embedding: empty column");
        model.quantizers.push_back({*std::min_element(column.begin(), column.end()), 1.0});
    }
    model.bit_widths = compute_bit_widths(set);

    if (stats != nullptr) stats->epoch_losses.assign(set.feature_count(), {});

    for (std::size_t c = 0; c < set.feature_count(); ++c) {
        const std::size_t width = model.bit_widths.widths[c];
        const auto column = extract_column(set.features, c);
        const Matrix bits = binarize_column(column, model.quantizers[c], width);
        const CbowDataset dataset = build_cbow_dataset(bits, window);

        DenseNet net({width, embedding_dim, width}, {Activation::Linear, Activation::Sigmoid},
                     derive_seed(cfg.seed, "sfe:feature:" + std::to_string(c)));

        if (dataset.short_input) {
            log::warn("sfe: column " + std::to_string(c) +
                      " too short for window, projection stays at initialization");
        } else {
            for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
                double loss_sum = 0.0;
                std::size_t batches = 0;
                for (std::size_t begin = 0; begin < dataset.x.rows(); begin += cfg.batch_size) {
                    const std::size_t end = std::min(begin + cfg.batch_size, dataset.x.rows());
                    std::vector<std::size_t> rows(end - begin);
                    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = begin + i;
                    loss_sum += sgd_step(net, dataset.x.gather_rows(rows),
                                         dataset.y.gather_rows(rows), cfg.learning_rate);
                    ++batches;
                }
                if (stats != nullptr)
                    stats->epoch_losses[c].push_back(loss_sum / static_cast<double>(batches));
            }
        }
        model.projections.push_back(net.weights(0));
    }
    return model;
}

EmbeddedSet embed(const SessionFeatureSet& set, const EmbeddingModel& model, EmbedStats* stats) {
    if (set.feature_count() != model.feature_count())
        throw DataError("embed: set has " + std::to_string(set.feature_count()) +
                        " feature columns, model expects " + std::to_string(model.feature_count()));
    for (std::size_t c = 0; c < set.column_names.size() && c < model.column_names.size(); ++c) {
        if (!model.column_names[c].empty() && set.column_names[c] != model.column_names[c]) {
            log::warn("embed: column " + std::to_string(c) + " is named '" + set.column_names[c] +
                      "' but the model was trained on '" + model.column_names[c] + "'");
        }
    }

    std::size_t clamped = 0;
    EmbeddedSet out;
    out.matrix = Matrix(set.rows(), model.output_dim());
    out.labels = set.labels;
    out.generated.assign(set.rows(), false);

    for (std::size_t c = 0; c < model.feature_count(); ++c) {
        const Matrix bits = binarize_column(extract_column(set.features, c), model.quantizers[c],
                                            model.bit_widths.widths[c], /*clamp=*/true, &clamped);
        const Matrix block = matmul(bits, model.projections[c]);
        const std::size_t offset = c * model.embedding_dim;
        for (std::size_t r = 0; r < block.rows(); ++r)
            for (std::size_t k = 0; k < block.cols(); ++k) out.matrix(r, offset + k) = block(r, k);
    }

    if (clamped > 0)
        log::warn("embed: clamped " + std::to_string(clamped) +
                  " out-of-range values into the trained bit range");
    if (stats != nullptr) stats->clamped_values = clamped;
    return out;
}

} // namespace sfegacn
