#pragma once

#include "sfegacn/dataset.hpp"
#include "sfegacn/gacn.hpp"
#include "sfegacn/nn.hpp"
#include "sfegacn/sfe.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sfegacn {

/// Reads a comma-separated file with a header row. Every column except the
/// label column must parse as a finite number; violations raise DataError
/// naming the row and column. Without a label column name all rows load as
/// unlabeled. A column named "generated" is read as the provenance flag, not
/// as a feature.
SessionFeatureSet load_csv(const std::filesystem::path& path,
                           const std::optional<std::string>& label_column);

void save_csv(const std::filesystem::path& path, const SessionFeatureSet& set,
              const std::string& label_column = "label");

/// Embedded sets reuse the same dialect: numeric feature columns plus
/// "label" and, for sets holding generated rows, "generated".
EmbeddedSet load_embedded_csv(const std::filesystem::path& path,
                              const std::string& label_column = "label");

void save_embedded_csv(const std::filesystem::path& path, const EmbeddedSet& set,
                       const std::string& label_column = "label");

/// One Gaussian blob per class: diagonal covariance around the class mean.
/// `overlap` pulls every class mean toward the pooled mean by a factor of
/// 1/(1+overlap); zero keeps the configured geometry.
struct SynthClass {
    std::string label;
    std::vector<double> mean;
    std::vector<double> variance; // diagonal
    std::size_t count = 0;
};

struct SynthConfig {
    std::vector<SynthClass> classes;
    double overlap = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

SessionFeatureSet synth_generate(const SynthConfig& cfg);

/// Per-label uniform subsampling without replacement, keeping original row
/// order. Exactly one of rate/count applies per call site: rate in (0,1]
/// keeps round(rate * n) rows of each label; count keeps that many rows of
/// every label and must not exceed any label's population.
SessionFeatureSet subsample_rate(const SessionFeatureSet& set, double rate, std::uint64_t seed);
SessionFeatureSet subsample_count(const SessionFeatureSet& set, std::size_t per_label,
                                  std::uint64_t seed);

/// Model container ("SFEG" magic, version 1): a key=value manifest section
/// followed by little-endian 64-bit float arrays in the order the manifest
/// declares. Round trips are exact. Loading a truncated or corrupt file, or
/// a newer container version, raises DataError without partial results.
void save_model(const std::filesystem::path& path, const DenseNet& net);
void save_model(const std::filesystem::path& path, const EmbeddingModel& model);
void save_model(const std::filesystem::path& path, const GacnModels& models);

/// The container kind stored at `path`: "dense-net", "embedding-model" or
/// "gacn-models".
std::string peek_model_kind(const std::filesystem::path& path);

DenseNet load_dense_net(const std::filesystem::path& path);
EmbeddingModel load_embedding_model(const std::filesystem::path& path);
/// History is export-only (CSV) and comes back empty.
GacnModels load_gacn_models(const std::filesystem::path& path);

} // namespace sfegacn
