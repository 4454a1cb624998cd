#pragma once

#include "sfegacn/dataset.hpp"
#include "sfegacn/gacn.hpp"
#include "sfegacn/nn.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sfegacn {

struct KmeansParams {
    std::size_t clusters = 2;
    std::uint64_t seed = 0;
    std::size_t max_iters = 300;
    double tol = 1e-4; // stop when the inertia improvement falls to this
};

struct Clustering {
    std::vector<std::size_t> assignments;
    Matrix centroids;
    double inertia = 0.0;
    /// Inertia after each Lloyd iteration (non-increasing).
    std::vector<double> inertia_trace;
};

/// Lloyd k-means with greedy farthest-point seeding off a seeded random
/// first centroid. Nearest-centroid ties break toward the lower cluster
/// index; a cluster that empties is re-seeded at the point farthest from its
/// assigned centroid. Throws ConfigError when rows < clusters.
Clustering kmeans(const Matrix& points, const KmeansParams& params);

/// First mining pass: for every cluster whose labelled share is at or below
/// delta, all unlabelled members are flagged. Returns ascending row indices
/// into the clustered matrix.
std::vector<std::size_t> first_step(const Clustering& clustering,
                                    const std::vector<bool>& labeled_mask, double delta);

struct ClassifierConfig {
    std::vector<std::size_t> hidden = {32};
    TrainConfig train;
};

/// Second mining pass: trains a (K+1)-way softmax classifier on the
/// augmented labelled rows (their K labels) plus the first-pass rows as one
/// extra "unknown" class, then keeps the first-pass rows the classifier
/// still predicts as unknown. Returns ascending indices into candidate_rows.
std::vector<std::size_t> second_step(const EmbeddedSet& augmented_labeled,
                                     const Matrix& candidate_rows, const ClassifierConfig& cfg);

struct DetectionMetrics {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::optional<double> tpr; // absent when there are no true unknowns
    std::optional<double> fpr; // absent when there are no true knowns
    std::optional<double> f1;  // absent when precision/recall are undefined
};

/// Confusion metrics of `detected` against `truth` over `population`
/// (ascending id vectors; detected must be a subset of population).
DetectionMetrics compute_metrics(const std::vector<std::size_t>& detected,
                                 const std::vector<std::size_t>& truth,
                                 const std::vector<std::size_t>& population);

struct DetectionConfig {
    std::size_t clusters = 0; // 0 -> twice the known-label count
    double delta = 0.1;
    std::vector<LabelCount> generation; // per-label generated row counts
    GacnConfig gacn;                    // template for augmentation
    ClassifierConfig classifier;
    std::size_t kmeans_max_iters = 300;
    double kmeans_tol = 1e-4;
    bool baseline_only = false; // skip the second step; H2 = H1
    std::uint64_t seed = 0;
};

struct ClusterStat {
    std::size_t cluster = 0;
    std::size_t total = 0;
    std::size_t labeled = 0;
    bool flagged = false;
};

struct DetectionReport {
    std::vector<std::size_t> h1; // unlabeled-set row ids, ascending
    std::vector<std::size_t> h2; // subset of h1
    std::vector<ClusterStat> clusters;
    /// Metrics of the first pass alone and of the final set, present when the
    /// unlabeled input carried truth labels.
    std::optional<DetectionMetrics> metrics_h1;
    std::optional<DetectionMetrics> metrics_h2;
    std::map<std::string, std::string> config_echo;
    std::size_t labeled_rows = 0;
    std::size_t generated_rows = 0;
    std::size_t unlabeled_rows = 0;
};

/// Full two-step mining run: augment the labelled set per config, pool it
/// with the unlabelled rows, cluster, flag sparse-label clusters (H1), then
/// classifier-filter the candidates (H2). Row ids in the report index the
/// unlabelled input. When the unlabelled set carries labels they are treated
/// as ground truth: a row whose label is absent from the labelled set counts
/// as a true unknown.
DetectionReport detect(const EmbeddedSet& labeled, const EmbeddedSet& unlabeled,
                       const DetectionConfig& cfg);

/// Structured text report: config echo, per-cluster CSV, id lists, metrics.
void write_detection_report(const std::filesystem::path& path, const DetectionReport& report);

} // namespace sfegacn
