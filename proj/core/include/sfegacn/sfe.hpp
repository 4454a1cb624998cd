#pragma once

#include "sfegacn/dataset.hpp"
#include "sfegacn/matrix.hpp"
#include "sfegacn/nn.hpp"

#include <cstdint>
#include <vector>

namespace sfegacn {

/// Bits per feature column; wide enough to encode the observed column
/// maximum after quantization, floor of 1.
struct BitWidths {
    std::vector<std::size_t> widths;
};

/// Per-column integer conversion: quantize(x) = round((x - offset) * scale).
/// Fitted with offset = column minimum and scale = 1.
struct Quantizer {
    double offset = 0.0;
    double scale = 1.0;

    bool operator==(const Quantizer& other) const = default;

    std::int64_t quantize(double value) const;
};

/// Trained per-column embedding. projections[i] is the retained first-layer
/// matrix of feature i's context net (bits x embedding_dim); the second
/// layer only exists during training.
struct EmbeddingModel {
    std::size_t embedding_dim = 0;
    std::size_t window = 0;
    BitWidths bit_widths;
    std::vector<Quantizer> quantizers;
    std::vector<Matrix> projections;
    std::vector<std::string> column_names;

    std::size_t feature_count() const { return projections.size(); }
    std::size_t output_dim() const { return feature_count() * embedding_dim; }
};

/// Number of bits needed for the largest quantized value in each column;
/// all-zero columns get 1 bit. Throws ConfigError on an empty set.
BitWidths compute_bit_widths(const SessionFeatureSet& set);

/// Fixed-width big-endian 0/1 encoding of one column. With clamp = false a
/// quantized value outside [0, 2^width - 1] raises DataError naming the row;
/// with clamp = true it is clamped into range and counted in *clamped.
Matrix binarize_column(const std::vector<double>& column, const Quantizer& quantizer,
                       std::size_t width, bool clamp = false, std::size_t* clamped = nullptr);

/// Decodes one 0/1 row back to its integer value (test/verification helper).
std::int64_t decode_bits(std::span<const double> bits);

/// Context-sum training pairs for one binarized column. For every center row
/// with a full window on both sides, x = elementwise sum of the 2*window
/// context rows (center excluded) and y = the center row. Columns shorter
/// than 2*window + 1 produce an empty dataset with `short_input` set.
struct CbowDataset {
    Matrix x;
    Matrix y;
    bool short_input = false;
};

CbowDataset build_cbow_dataset(const Matrix& bits, std::size_t window);

/// Optional per-feature training diagnostics.
struct SfeTrainStats {
    /// mean BCE per epoch, one series per feature
    std::vector<std::vector<double>> epoch_losses;
};

/// Fits quantizers and bit widths on the set, then trains one
/// bits -> embedding_dim -> bits net per column on its context dataset and
/// keeps the first-layer matrix. Feature nets draw from per-feature seed
/// streams, so results do not depend on training order.
EmbeddingModel train_embedding(const SessionFeatureSet& set, std::size_t embedding_dim,
                               std::size_t window, const TrainConfig& cfg,
                               SfeTrainStats* stats = nullptr);

struct EmbedStats {
    std::size_t clamped_values = 0;
};

/// Maps a feature set through a trained model: per feature, binarized rows
/// times the retained projection, blocks concatenated left to right. Values
/// outside the fitted range are clamped and counted. Throws DataError when
/// the column count does not match the model.
EmbeddedSet embed(const SessionFeatureSet& set, const EmbeddingModel& model,
                  EmbedStats* stats = nullptr);

} // namespace sfegacn
