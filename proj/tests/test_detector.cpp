#include <doctest.h>

#include <sfegacn/detector.hpp>
#include <sfegacn/error.hpp>
#include <sfegacn/rng.hpp>

#include "oracles.hpp"

#include <algorithm>
#include <set>

using namespace sfegacn;

namespace {

Matrix blob_matrix(const std::vector<std::pair<double, double>>& centers, std::size_t per_center,
                   double spread, std::uint64_t seed) {
    Matrix m(centers.size() * per_center, 2);
    RngStream rng(seed);
    std::size_t row = 0;
    for (const auto& [cx, cy] : centers)
        for (std::size_t i = 0; i < per_center; ++i, ++row) {
            m(row, 0) = cx + spread * rng.normal();
            m(row, 1) = cy + spread * rng.normal();
        }
    return m;
}

EmbeddedSet labeled_blobs(const std::vector<std::string>& labels_per_center,
                          std::size_t per_center, double gap, double spread, std::uint64_t seed) {
    std::vector<std::pair<double, double>> centers;
    for (std::size_t i = 0; i < labels_per_center.size(); ++i)
        centers.push_back({gap * static_cast<double>(i), gap * static_cast<double>(i % 2)});
    EmbeddedSet set;
    set.matrix = blob_matrix(centers, per_center, spread, seed);
    for (const auto& label : labels_per_center)
        for (std::size_t i = 0; i < per_center; ++i) set.labels.push_back(label);
    set.generated.assign(set.matrix.rows(), false);
    return set;
}

} // namespace

TEST_CASE("kmeans: two separated pairs split exactly") {
    const Matrix points = Matrix::from_rows({{0, 0}, {0.2, 0}, {10, 10}, {10.2, 10}});
    KmeansParams params;
    params.clusters = 2;
    params.seed = 3;
    const Clustering got = kmeans(points, params);

    CHECK(got.assignments[0] == got.assignments[1]);
    CHECK(got.assignments[2] == got.assignments[3]);
    CHECK(got.assignments[0] != got.assignments[2]);
    CHECK(got.inertia == doctest::Approx(oracles::exhaustive_best_inertia(points, 2)));
}

TEST_CASE("kmeans: q = 1 gives the mean and the total squared deviation") {
    const Matrix points = Matrix::from_rows({{1, 1}, {3, 5}, {5, 3}});
    KmeansParams params;
    params.clusters = 1;
    const Clustering got = kmeans(points, params);
    CHECK(got.centroids(0, 0) == doctest::Approx(3.0));
    CHECK(got.centroids(0, 1) == doctest::Approx(3.0));
    double expected = 0.0;
    for (std::size_t r = 0; r < 3; ++r)
        expected += (points(r, 0) - 3.0) * (points(r, 0) - 3.0) +
                    (points(r, 1) - 3.0) * (points(r, 1) - 3.0);
    CHECK(got.inertia == doctest::Approx(expected));
}

TEST_CASE("kmeans: 8-point instances against the exhaustive partition oracle") {
    RngStream rng(41);
    for (int trial = 0; trial < 6; ++trial) {
        Matrix points(8, 2);
        for (double& v : points.data()) v = rng.uniform(0, 10);
        KmeansParams params;
        params.clusters = 2;
        params.seed = rng.next_u64();
        const Clustering got = kmeans(points, params);
        const double best = oracles::exhaustive_best_inertia(points, 2);
        // Lloyd converges to a local optimum: never below the global one.
        CHECK(got.inertia >= best - 1e-9);
    }
    SUBCASE("separated instance reaches the global optimum") {
        Matrix points(8, 2);
        for (std::size_t r = 0; r < 4; ++r) {
            points(r, 0) = rng.uniform(0, 1);
            points(r, 1) = rng.uniform(0, 1);
            points(r + 4, 0) = 50 + rng.uniform(0, 1);
            points(r + 4, 1) = 50 + rng.uniform(0, 1);
        }
        KmeansParams params;
        params.clusters = 2;
        params.seed = 7;
        const Clustering got = kmeans(points, params);
        CHECK(got.inertia == doctest::Approx(oracles::exhaustive_best_inertia(points, 2)));
    }
}

TEST_CASE("kmeans: inertia is non-increasing over Lloyd iterations") {
    RngStream rng(55);
    Matrix points(60, 3);
    for (double& v : points.data()) v = rng.uniform(0, 5);
    KmeansParams params;
    params.clusters = 5;
    params.seed = 1;
    params.tol = 0.0;
    params.max_iters = 40;
    const Clustering got = kmeans(points, params);
    for (std::size_t i = 1; i < got.inertia_trace.size(); ++i)
        CHECK(got.inertia_trace[i] <= got.inertia_trace[i - 1] + 1e-9);
}

TEST_CASE("kmeans: duplicate-heavy data still assigns every row") {
    Matrix points(10, 2); // all identical rows
    KmeansParams params;
    params.clusters = 4;
    params.seed = 2;
    const Clustering got = kmeans(points, params);
    CHECK(got.assignments.size() == 10);
    for (std::size_t a : got.assignments) CHECK(a < 4);
    CHECK(got.inertia == doctest::Approx(0.0));
}

TEST_CASE("kmeans: fewer rows than clusters is a config error") {
    KmeansParams params;
    params.clusters = 5;
    CHECK_THROWS_AS(kmeans(Matrix(3, 2), params), ConfigError);
}

TEST_CASE("first_step: labelled share against delta") {
    // One cluster of 10 (indices 0-9), second cluster of 4 (10-13).
    Clustering clustering;
    clustering.centroids = Matrix(2, 1);
    clustering.assignments = {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1};

    SUBCASE("no labelled rows: everything in the cluster is flagged") {
        std::vector<bool> mask(14, false);
        for (std::size_t r = 10; r < 14; ++r) mask[r] = true; // second cluster fully labelled
        const auto h1 = first_step(clustering, mask, 0.1);
        CHECK(h1 == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    }
    SUBCASE("5 labelled of 10 at delta 0.1: none flagged") {
        std::vector<bool> mask(14, true);
        for (std::size_t r = 0; r < 5; ++r) mask[r] = false;
        const auto h1 = first_step(clustering, mask, 0.1);
        CHECK(h1.empty());
    }
    SUBCASE("delta = 1 flags every unlabelled row") {
        std::vector<bool> mask(14, false);
        mask[0] = mask[10] = true;
        const auto h1 = first_step(clustering, mask, 1.0);
        CHECK(h1.size() == 12);
    }
    SUBCASE("delta = 0 flags only clusters with zero labelled rows") {
        std::vector<bool> mask(14, false);
        mask[10] = true; // second cluster has one labelled row
        const auto h1 = first_step(clustering, mask, 0.0);
        CHECK(h1 == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    }
}

TEST_CASE("second_step: empty candidates and subset semantics") {
    const EmbeddedSet labeled = labeled_blobs({"a", "b", "c"}, 30, 10.0, 0.5, 61);
    ClassifierConfig cfg;
    cfg.train.epochs = 60;
    cfg.train.learning_rate = 0.3;
    cfg.train.seed = 4;

    SUBCASE("no candidates, no output") {
        CHECK(second_step(labeled, Matrix(0, 2), cfg).empty());
    }
    SUBCASE("mixed candidates: known-class rows drop out, novel rows stay") {
        // Candidates: 20 rows near a novel far-away center, 10 near class a.
        Matrix candidates = blob_matrix({{40, -40}}, 20, 0.5, 62);
        candidates.append_rows(blob_matrix({{0, 0}}, 10, 0.5, 63));
        const auto kept = second_step(labeled, candidates, cfg);
        CHECK(kept.size() <= 30);
        std::size_t novel_kept = 0, known_kept = 0;
        for (std::size_t i : kept) (i < 20 ? novel_kept : known_kept)++;
        // Precision improves: the novel block should dominate what is kept.
        CHECK(novel_kept == 20);
        CHECK(known_kept < 10);
    }
}

TEST_CASE("compute_metrics: arithmetic and degenerate cases") {
    SUBCASE("tp=93 fn=7 fp=2 tn=98") {
        std::vector<std::size_t> population(200);
        for (std::size_t i = 0; i < 200; ++i) population[i] = i;
        std::vector<std::size_t> truth(100);
        for (std::size_t i = 0; i < 100; ++i) truth[i] = i;
        std::vector<std::size_t> detected;
        for (std::size_t i = 0; i < 93; ++i) detected.push_back(i);    // tp
        detected.push_back(100);                                       // fp
        detected.push_back(101);                                       // fp
        const DetectionMetrics m = compute_metrics(detected, truth, population);
        CHECK(m.tp == 93);
        CHECK(m.fn == 7);
        CHECK(m.fp == 2);
        CHECK(m.tn == 98);
        CHECK(*m.tpr == doctest::Approx(0.93));
        CHECK(*m.fpr == doctest::Approx(0.02));
    }
    SUBCASE("perfect detection") {
        const std::vector<std::size_t> population{0, 1, 2, 3};
        const std::vector<std::size_t> truth{1, 3};
        const DetectionMetrics m = compute_metrics(truth, truth, population);
        CHECK(*m.tpr == 1.0);
        CHECK(*m.fpr == 0.0);
        CHECK(*m.f1 == 1.0);
    }
    SUBCASE("empty truth: TPR reported absent") {
        const std::vector<std::size_t> population{0, 1, 2};
        const DetectionMetrics m = compute_metrics({0}, {}, population);
        CHECK(!m.tpr.has_value());
        CHECK(m.fpr.has_value());
    }
    SUBCASE("detected must be inside the population") {
        CHECK_THROWS_AS(compute_metrics({5}, {}, {0, 1}), ConfigError);
    }
}

namespace {

DetectionConfig desk_config(std::uint64_t seed) {
    DetectionConfig cfg;
    cfg.delta = 0.1;
    cfg.seed = seed;
    cfg.gacn.iterations = 120;
    cfg.gacn.batch_size = 16;
    cfg.gacn.noise_dim = 4;
    cfg.gacn.gen_hidden = {16};
    cfg.gacn.disc_hidden = {8};
    cfg.classifier.hidden = {16};
    cfg.classifier.train.epochs = 80;
    cfg.classifier.train.learning_rate = 0.3;
    cfg.classifier.train.batch_size = 32;
    return cfg;
}

} // namespace

TEST_CASE("detect: separable data with no unknowns keeps the false-positive rate low") {
    const EmbeddedSet labeled = labeled_blobs({"a", "b", "c"}, 40, 12.0, 0.6, 71);
    EmbeddedSet unlabeled = labeled; // same rows, truth labels kept
    DetectionConfig cfg = desk_config(5);
    cfg.generation = {{"a", 40}, {"b", 40}, {"c", 40}};
    const DetectionReport report = detect(labeled, unlabeled, cfg);
    REQUIRE(report.metrics_h2.has_value());
    CHECK(!report.metrics_h2->tpr.has_value()); // no unknowns exist
    CHECK(*report.metrics_h2->fpr <= 0.1);
}

TEST_CASE("detect: a novel far cluster is mined with high TPR") {
    const EmbeddedSet labeled = labeled_blobs({"a", "b", "c"}, 40, 12.0, 0.6, 81);
    EmbeddedSet unlabeled = labeled_blobs({"a", "b", "c"}, 30, 12.0, 0.6, 82);
    //

    const Matrix novel = blob_matrix({{-30, 30}}, 30, 0.6, 83);
    for (std::size_t r = 0; r < novel.rows(); ++r)
        unlabeled.append_row(novel.row(r), "novel", false);

    DetectionConfig cfg = desk_config(6);
    cfg.generation = {{"a", 40}, {"b", 40}, {"c", 40}};
    const DetectionReport report = detect(labeled, unlabeled, cfg);

    REQUIRE(report.metrics_h2.has_value());
    CHECK(*report.metrics_h2->tpr >= 0.85);

    SUBCASE("invariants: H2 within H1 within the unlabeled ids") {
        CHECK(std::includes(report.h1.begin(), report.h1.end(), report.h2.begin(),
                            report.h2.end()));
        for (std::size_t id : report.h1) CHECK(id < unlabeled.rows());
    }
    SUBCASE("baseline mode copies H1 into H2") {
        DetectionConfig base = cfg;
        base.baseline_only = true;
        const DetectionReport baseline = detect(labeled, unlabeled, base);
        CHECK(baseline.h2 == baseline.h1);
        CHECK(baseline.h1 == report.h1);
    }
    SUBCASE("determinism: reports repeat exactly") {
        const DetectionReport again = detect(labeled, unlabeled, cfg);
        CHECK(again.h1 == report.h1);
        CHECK(again.h2 == report.h2);
        CHECK(again.metrics_h2->tp == report.metrics_h2->tp);
    }
}

TEST_CASE("detect: duplicated labelled data with pure clusters yields an empty H1") {
    const EmbeddedSet labeled = labeled_blobs({"a", "b"}, 30, 15.0, 0.4, 91);
    EmbeddedSet unlabeled = labeled;
    for (auto& label : unlabeled.labels) label = kUnlabeled;

    DetectionConfig cfg = desk_config(7);
    cfg.clusters = 2;
    cfg.generation = {}; // no augmentation: clusters are exactly half labelled
    cfg.delta = 0.4;
    const DetectionReport report = detect(labeled, unlabeled, cfg);
    CHECK(report.h1.empty());
    CHECK(report.h2.empty());
    CHECK(!report.metrics_h2.has_value()); // nothing carried truth labels
}
