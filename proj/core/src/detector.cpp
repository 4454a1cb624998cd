#include "sfegacn/detector.hpp"

#include "sfegacn/config_text.hpp"
#include "sfegacn/error.hpp"
#include "sfegacn/log.hpp"
#include "sfegacn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace sfegacn {

namespace {

std::vector<std::size_t> nearest_assignments(const Matrix& points, const Matrix& centroids) {
    std::vector<std::size_t> assignment(points.rows(), 0);
    for (std::size_t r = 0; r < points.rows(); ++r) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t pick = 0;
        for (std::size_t k = 0; k < centroids.rows(); ++k) {
            const double d = squared_distance(points.row(r), centroids.row(k));
            if (d < best) { // strict: ties stay with the lower index
                best = d;
                pick = k;
            }
        }
        assignment[r] = pick;
    }
    return assignment;
}

double total_inertia(const Matrix& points, const Matrix& centroids,
                     const std::vector<std::size_t>& assignment) {
    double sum = 0.0;
    for (std::size_t r = 0; r < points.rows(); ++r)
        sum += squared_distance(points.row(r), centroids.row(assignment[r]));
    return sum;
}

} // namespace

Clustering kmeans(const Matrix& points, const KmeansParams& params) {
    const std::size_t n = points.rows();
    const std::size_t q = params.clusters;
    if (q == 0) throw ConfigError("kmeans: cluster count must be positive");
    if (n < q)
        throw ConfigError("kmeans: " + std::to_string(n) + " rows cannot form " +
                          std::to_string(q) + " clusters");

    // Greedy farthest-point seeding from a seeded random first centroid.
    Matrix centroids(q, points.cols());
    RngStream rng(derive_seed(params.seed, "kmeans:seed"));
    centroids.set_row(0, points.row(rng.uniform_index(n)));
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    for (std::size_t k = 1; k < q; ++k) {
        std::size_t farthest = 0;
        double far_dist = -1.0;
        for (std::size_t r = 0; r < n; ++r) {
            nearest[r] = std::min(nearest[r], squared_distance(points.row(r), centroids.row(k - 1)));
            if (nearest[r] > far_dist) {
                far_dist = nearest[r];
                farthest = r;
            }
        }
        centroids.set_row(k, points.row(farthest));
    }

    Clustering result;
    result.centroids = std::move(centroids);
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t iter = 0; iter < params.max_iters; ++iter) {
        result.assignments = nearest_assignments(points, result.centroids);

        // Means update.
        Matrix sums(q, points.cols());
        std::vector<std::size_t> counts(q, 0);
        for (std::size_t r = 0; r < n; ++r) {
            ++counts[result.assignments[r]];
            for (std::size_t c = 0; c < points.cols(); ++c)
                sums(result.assignments[r], c) += points(r, c);
        }
        for (std::size_t k = 0; k < q; ++k) {
            if (counts[k] == 0) continue;
            for (std::size_t c = 0; c < points.cols(); ++c)
                result.centroids(k, c) = sums(k, c) / static_cast<double>(counts[k]);
        }

        // Empty-cluster repair: move the centroid onto the point farthest
        // from its assigned centroid, one point per empty cluster.
        std::vector<bool> relocated(n, false);
        for (std::size_t k = 0; k < q; ++k) {
            if (counts[k] != 0) continue;
            std::size_t pick = 0;
            double worst = -1.0;
            for (std::size_t r = 0; r < n; ++r) {
                if (relocated[r]) continue;
                const double d =
                    squared_distance(points.row(r), result.centroids.row(result.assignments[r]));
                if (d > worst) {
                    worst = d;
                    pick = r;
                }
            }
            result.centroids.set_row(k, points.row(pick));
            result.assignments[pick] = k;
            relocated[pick] = true;
        }

        result.assignments = nearest_assignments(points, result.centroids);
        result.inertia = total_inertia(points, result.centroids, result.assignments);
        result.inertia_trace.push_back(result.inertia);
        if (previous - result.inertia <= params.tol) break;
        previous = result.inertia;
    }
    return result;
}

std::vector<std::size_t> first_step(const Clustering& clustering,
                                    const std::vector<bool>& labeled_mask, double delta) {
    if (labeled_mask.size() != clustering.assignments.size())
        throw ShapeError("first_step: mask length does not match clustering");
    if (!(delta >= 0.0 && delta <= 1.0))
        throw ConfigError("first_step: delta must lie in [0,1]");

    const std::size_t q = clustering.centroids.rows();
    std::vector<std::size_t> total(q, 0), labeled(q, 0);
    for (std::size_t r = 0; r < clustering.assignments.size(); ++r) {
        ++total[clustering.assignments[r]];
        if (labeled_mask[r]) ++labeled[clustering.assignments[r]];
    }
    std::vector<bool> flagged(q, false);
    for (std::size_t k = 0; k < q; ++k)
        flagged[k] = static_cast<double>(labeled[k]) <= delta * static_cast<double>(total[k]);

    std::vector<std::size_t> h1;
    for (std::size_t r = 0; r < clustering.assignments.size(); ++r)
        if (!labeled_mask[r] && flagged[clustering.assignments[r]]) h1.push_back(r);
    return h1;
}

std::vector<std::size_t> second_step(const EmbeddedSet& augmented_labeled,
                                     const Matrix& candidate_rows, const ClassifierConfig& cfg) {
    if (candidate_rows.rows() == 0) return {};
    cfg.train.validate();

    const auto labels = augmented_labeled.known_labels();
    const std::size_t known = labels.size();
    if (known == 0) throw ConfigError("second_step: no labelled categories");
    const std::size_t classes = known + 1; // extra "unknown" output

    Matrix train_x = augmented_labeled.matrix;
    train_x.append_rows(candidate_rows);
    Matrix train_y(train_x.rows(), classes);
    for (std::size_t r = 0; r < augmented_labeled.rows(); ++r) {
        const auto it = std::find(labels.begin(), labels.end(), augmented_labeled.labels[r]);
        train_y(r, static_cast<std::size_t>(it - labels.begin())) = 1.0;
    }
    for (std::size_t r = augmented_labeled.rows(); r < train_x.rows(); ++r)
        train_y(r, known) = 1.0;

    std::vector<std::size_t> dims{train_x.cols()};
    dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
    dims.push_back(classes);
    std::vector<Activation> acts(cfg.hidden.size(), Activation::Relu);
    acts.push_back(Activation::Softmax);
    DenseNet net(dims, acts, derive_seed(cfg.train.seed, "second-step:init"));

    RngStream shuffler(derive_seed(cfg.train.seed, "second-step:shuffle"));
    std::vector<std::size_t> ordering(train_x.rows());
    for (std::size_t i = 0; i < ordering.size(); ++i) ordering[i] = i;
    for (std::size_t epoch = 0; epoch < cfg.train.epochs; ++epoch) {
        shuffler.shuffle(ordering);
        for (std::size_t begin = 0; begin < ordering.size(); begin += cfg.train.batch_size) {
            const std::size_t end = std::min(begin + cfg.train.batch_size, ordering.size());
            const std::vector<std::size_t> rows(ordering.begin() + static_cast<std::ptrdiff_t>(begin),
                                                ordering.begin() + static_cast<std::ptrdiff_t>(end));
            sgd_step(net, train_x.gather_rows(rows), train_y.gather_rows(rows),
                     cfg.train.learning_rate);
        }
    }

    // Candidates self-validate: keep the ones still predicted unknown.
    const Matrix predictions = net.forward(candidate_rows);
    std::vector<std::size_t> kept;
    for (std::size_t r = 0; r < predictions.rows(); ++r) {
        std::size_t argmax = 0;
        for (std::size_t c = 1; c < classes; ++c)
            if (predictions(r, c) > predictions(r, argmax)) argmax = c;
        if (argmax == known) kept.push_back(r);
    }
    return kept;
}

DetectionMetrics compute_metrics(const std::vector<std::size_t>& detected,
                                 const std::vector<std::size_t>& truth,
                                 const std::vector<std::size_t>& population) {
    if (!std::includes(population.begin(), population.end(), detected.begin(), detected.end()))
        throw ConfigError("metrics: detected set is not a subset of the population");

    DetectionMetrics m;
    for (std::size_t id : population) {
        const bool is_detected = std::binary_search(detected.begin(), detected.end(), id);
        const bool is_unknown = std::binary_search(truth.begin(), truth.end(), id);
        if (is_detected && is_unknown) ++m.tp;
        else if (is_detected && !is_unknown) ++m.fp;
        else if (!is_detected && is_unknown) ++m.fn;
        else ++m.tn;
    }
    if (m.tp + m.fn > 0)
        m.tpr = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    if (m.fp + m.tn > 0)
        m.fpr = static_cast<double>(m.fp) / static_cast<double>(m.fp + m.tn);
    if (m.tp + m.fn > 0) {
        // F1 of the "unknown" detection; zero when nothing was detected.
        const double denom = static_cast<double>(2 * m.tp + m.fp + m.fn);
        m.f1 = denom > 0.0 ? 2.0 * static_cast<double>(m.tp) / denom : 0.0;
    }
    return m;
}

DetectionReport detect(const EmbeddedSet& labeled, const EmbeddedSet& unlabeled,
                       const DetectionConfig& cfg) {
    const auto known = labeled.known_labels();
    if (known.empty()) throw ConfigError("detect: labelled set has no categories");
    if (unlabeled.rows() == 0) throw ConfigError("detect: unlabelled set is empty");
    if (labeled.dim() != unlabeled.dim())
        throw ShapeError("detect: labelled and unlabelled dimensionality differ");

    // Augment, then pool. Generated rows count as labelled mass.
    GacnConfig gacn_cfg = cfg.gacn;
    gacn_cfg.seed = derive_seed(cfg.seed, "detect:augment");
    const EmbeddedSet augmented = augment_all(labeled, cfg.generation, gacn_cfg);

    Matrix pool = augmented.matrix;
    pool.append_rows(unlabeled.matrix);
    std::vector<bool> labeled_mask(pool.rows(), false);
    for (std::size_t r = 0; r < augmented.rows(); ++r) labeled_mask[r] = true;

    KmeansParams km;
    km.clusters = cfg.clusters != 0 ? cfg.clusters : 2 * known.size();
    km.seed = derive_seed(cfg.seed, "detect:kmeans");
    km.max_iters = cfg.kmeans_max_iters;
    km.tol = cfg.kmeans_tol;
    const Clustering clustering = kmeans(pool, km);

    const std::vector<std::size_t> h1_pool_ids = first_step(clustering, labeled_mask, cfg.delta);

    DetectionReport report;
    report.labeled_rows = labeled.rows();
    report.generated_rows = augmented.rows() - labeled.rows();
    report.unlabeled_rows = unlabeled.rows();

    // Per-cluster table.
    report.clusters.resize(km.clusters);
    for (std::size_t k = 0; k < km.clusters; ++k) report.clusters[k].cluster = k;
    for (std::size_t r = 0; r < pool.rows(); ++r) {
        auto& stat = report.clusters[clustering.assignments[r]];
        ++stat.total;
        if (labeled_mask[r]) ++stat.labeled;
    }
    for (auto& stat : report.clusters)
        stat.flagged =
            static_cast<double>(stat.labeled) <= cfg.delta * static_cast<double>(stat.total);

    // Map pool ids back to unlabeled-set row ids.
    const std::size_t offset = augmented.rows();
    report.h1.reserve(h1_pool_ids.size());
    for (std::size_t id : h1_pool_ids) report.h1.push_back(id - offset);

    if (cfg.baseline_only || report.h1.empty()) {
        report.h2 = report.h1;
    } else {
        ClassifierConfig cls = cfg.classifier;
        cls.train.seed = derive_seed(cfg.seed, "detect:classifier");
        const Matrix candidates = unlabeled.matrix.gather_rows(report.h1);
        const std::vector<std::size_t> kept = second_step(augmented, candidates, cls);
        report.h2.reserve(kept.size());
        for (std::size_t i : kept) report.h2.push_back(report.h1[i]);
    }

    // Ground truth, when the unlabeled set carries labels.
    std::vector<std::size_t> population, truth;
    for (std::size_t r = 0; r < unlabeled.rows(); ++r) {
        if (unlabeled.labels[r] == kUnlabeled) continue;
        population.push_back(r);
        if (std::find(known.begin(), known.end(), unlabeled.labels[r]) == known.end())
            truth.push_back(r);
    }
    if (!population.empty()) {
        auto keep_in_population = [&](const std::vector<std::size_t>& ids) {
            std::vector<std::size_t> out;
            for (std::size_t id : ids)
                if (std::binary_search(population.begin(), population.end(), id)) out.push_back(id);
            return out;
        };
        report.metrics_h1 = compute_metrics(keep_in_population(report.h1), truth, population);
        report.metrics_h2 = compute_metrics(keep_in_population(report.h2), truth, population);
    }

    report.config_echo["clusters"] = std::to_string(km.clusters);
    report.config_echo["delta"] = format_double(cfg.delta);
    report.config_echo["baseline_only"] = cfg.baseline_only ? "true" : "false";
    report.config_echo["seed"] = std::to_string(cfg.seed);
    report.config_echo["known_labels"] = [&] {
        std::string joined;
        for (const auto& label : known) {
            if (!joined.empty()) joined += ",";
            joined += label;
        }
        return joined;
    }();
    return report;
}

void write_detection_report(const std::filesystem::path& path, const DetectionReport& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path.string());

    out << "# detection report\n";
    for (const auto& [key, value] : report.config_echo) out << key << " = " << value << "\n";
    out << "labeled_rows = " << report.labeled_rows << "\n";
    out << "generated_rows = " << report.generated_rows << "\n";
    out << "unlabeled_rows = " << report.unlabeled_rows << "\n";

    out << "\n[clusters]\ncluster,total,labeled,flagged\n";
    for (const auto& stat : report.clusters)
        out << stat.cluster << ',' << stat.total << ',' << stat.labeled << ','
            << (stat.flagged ? 1 : 0) << '\n';

    out << "\n[h1]\nrow_id\n";
    for (std::size_t id : report.h1) out << id << '\n';
    out << "\n[h2]\nrow_id\n";
    for (std::size_t id : report.h2) out << id << '\n';

    auto metrics_line = [&](const char* name, const DetectionMetrics& m) {
        out << name << ',' << m.tp << ',' << m.fp << ',' << m.tn << ',' << m.fn << ','
            << (m.tpr ? format_double(*m.tpr) : "n/a") << ','
            << (m.fpr ? format_double(*m.fpr) : "n/a") << ','
            << (m.f1 ? format_double(*m.f1) : "n/a") << '\n';
    };
    out << "\n[metrics]\nset,tp,fp,tn,fn,tpr,fpr,f1\n";
    if (report.metrics_h1) metrics_line("h1", *report.metrics_h1);
    if (report.metrics_h2) metrics_line("h2", *report.metrics_h2);
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace sfegacn
