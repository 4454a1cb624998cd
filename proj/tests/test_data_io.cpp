#include <doctest.h>

#include <sfegacn/data_io.hpp>
#include <sfegacn/error.hpp>
#include <sfegacn/rng.hpp>
#include <sfegacn/sfe.hpp>

#include <filesystem>
#include <fstream>

using namespace sfegacn;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

std::filesystem::path write_text(const std::string& name, const std::string& text) {
    const auto path = temp_file(name);
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path;
}

} // namespace

TEST_CASE("load_csv: header, labels, numeric features") {
    const auto path = write_text("io_basic.csv",
                                 "bytes,packets,label\n"
                                 "100,3,dos\n"
                                 "2.5,1,benign\n"
                                 "7e2,9,dos\n");
    const SessionFeatureSet set = load_csv(path, "label");
    CHECK(set.rows() == 3);
    CHECK(set.feature_count() == 2);
    CHECK(set.column_names == std::vector<std::string>{"bytes", "packets"});
    CHECK(set.labels == std::vector<std::string>{"dos", "benign", "dos"});
    CHECK(set.features(2, 0) == 700.0);
}

TEST_CASE("load_csv: quoted fields with embedded commas") {
    const auto path = write_text("io_quoted.csv",
                                 "f0,label\n"
                                 "1,\"a,b\"\n"
                                 "2,\"say \"\"hi\"\"\"\n");
    const SessionFeatureSet set = load_csv(path, "label");
    CHECK(set.labels[0] == "a,b");
    CHECK(set.labels[1] == "say \"hi\"");
}

TEST_CASE("load_csv: error reporting names row and column") {
    SUBCASE("NaN cell") {
        const auto path = write_text("io_nan.csv", "f0,f1,label\n1,NaN,x\n");
        CHECK_THROWS_WITH_AS(load_csv(path, "label"),
                             doctest::Contains("line 2, column 'f1'"), DataError);
    }
    SUBCASE("infinite cell") {
        const auto path = write_text("io_inf.csv", "f0,label\ninf,x\n");
        CHECK_THROWS_AS(load_csv(path, "label"), DataError);
    }
    SUBCASE("non-numeric cell") {
        const auto path = write_text("io_junk.csv", "f0,label\nhello,x\n");
        CHECK_THROWS_WITH_AS(load_csv(path, "label"), doctest::Contains("column 'f0'"), DataError);
    }
    SUBCASE("missing label column") {
        const auto path = write_text("io_nolabel.csv", "f0,f1\n1,2\n");
        CHECK_THROWS_WITH_AS(load_csv(path, "label"), doctest::Contains("label"), DataError);
    }
    SUBCASE("ragged row") {
        const auto path = write_text("io_ragged.csv", "f0,f1,label\n1,2,x\n1,x\n");
        CHECK_THROWS_WITH_AS(load_csv(path, "label"), doctest::Contains("line 3"), DataError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_csv(temp_file("io_absent.csv"), "label"), DataError);
    }
}

TEST_CASE("load_csv: no label column name loads everything unlabeled") {
    const auto path = write_text("io_unlabeled.csv", "f0,f1\n1,2\n3,4\n");
    const SessionFeatureSet set = load_csv(path, std::nullopt);
    CHECK(set.feature_count() == 2);
    CHECK(set.labels == std::vector<std::string>{kUnlabeled, kUnlabeled});
}

TEST_CASE("save_csv / load_csv round trip is exact") {
    SessionFeatureSet set;
    set.column_names = {"a", "b"};
    set.features = Matrix(3, 2);
    RngStream rng(10);
    for (double& v : set.features.data()) v = rng.uniform(-1e6, 1e6) / 3.0;
    set.labels = {"x", "y, with comma", "z"};

    const auto path = temp_file("io_roundtrip.csv");
    save_csv(path, set);
    const SessionFeatureSet back = load_csv(path, "label");
    CHECK(back.labels == set.labels);
    REQUIRE(back.features.rows() == set.features.rows());
    for (std::size_t i = 0; i < set.features.data().size(); ++i)
        CHECK(back.features.data()[i] == set.features.data()[i]);
}

TEST_CASE("embedded csv round trip keeps the generated flags") {
    EmbeddedSet set;
    set.matrix = Matrix::from_rows({{1.5, 2.5}, {3.5, 4.5}});
    set.labels = {"a", "b"};
    set.generated = {false, true};
    const auto path = temp_file("io_embedded.csv");
    save_embedded_csv(path, set);
    const EmbeddedSet back = load_embedded_csv(path);
    CHECK(back == set);
}

TEST_CASE("synth_generate: counts, determinism, separability") {
    SynthConfig cfg;
    cfg.seed = 5;
    cfg.classes = {{"a", {0, 0}, {1, 1}, 50}, {"b", {10, 0}, {1, 1}, 50}};

    SUBCASE("two classes x 50 rows") {
        const SessionFeatureSet set = synth_generate(cfg);
        CHECK(set.rows() == 100);
        std::size_t a = 0;
        for (const auto& label : set.labels) a += label == "a" ? 1 : 0;
        CHECK(a == 50);
    }
    SUBCASE("same seed twice") {
        const SessionFeatureSet once = synth_generate(cfg);
        const SessionFeatureSet twice = synth_generate(cfg);
        CHECK(once.features == twice.features);
        CHECK(once.labels == twice.labels);
    }
    SUBCASE("overlap 0 with means 10 apart: nearest-centroid gets >= 99%") {
        const SessionFeatureSet set = synth_generate(cfg);
        std::size_t correct = 0;
        for (std::size_t r = 0; r < set.rows(); ++r) {
            const double da = set.features(r, 0) * set.features(r, 0);
            const double db = (set.features(r, 0) - 10) * (set.features(r, 0) - 10);
            const bool says_a = da + set.features(r, 1) * set.features(r, 1) <
                                db + set.features(r, 1) * set.features(r, 1);
            if ((set.labels[r] == "a") == says_a) ++correct;
        }
        CHECK(correct >= 99);
    }
    SUBCASE("large overlap pulls the classes together") {
        SynthConfig merged = cfg;
        merged.overlap = 100.0;
        const SessionFeatureSet set = synth_generate(merged);
        double mean_a = 0, mean_b = 0;
        for (std::size_t r = 0; r < set.rows(); ++r)
            (set.labels[r] == "a" ? mean_a : mean_b) += set.features(r, 0) / 50.0;
        CHECK(std::abs(mean_a - mean_b) < 1.0);
    }
    SUBCASE("validation") {
        SynthConfig bad = cfg;
        bad.classes[0].count = 0;
        CHECK_THROWS_AS(synth_generate(bad), ConfigError);
        bad = cfg;
        bad.classes[1].mean = {1, 2, 3};
        CHECK_THROWS_AS(synth_generate(bad), ConfigError);
    }
}

TEST_CASE("subsample: rates, counts, determinism") {
    SynthConfig cfg;
    cfg.seed = 6;
    cfg.classes = {{"a", {0}, {1}, 100}, {"b", {5}, {1}, 40}};
    const SessionFeatureSet set = synth_generate(cfg);

    SUBCASE("rate 1.0 is the identity") {
        const SessionFeatureSet out = subsample_rate(set, 1.0, 3);
        CHECK(out.features == set.features);
        CHECK(out.labels == set.labels);
    }
    SUBCASE("rate 0.1 keeps 10 of 100 and 4 of 40") {
        const SessionFeatureSet out = subsample_rate(set, 0.1, 3);
        std::size_t a = 0, b = 0;
        for (const auto& label : out.labels) (label == "a" ? a : b)++;
        CHECK(a == 10);
        CHECK(b == 4);
    }
    SUBCASE("same seed twice") {
        const SessionFeatureSet once = subsample_rate(set, 0.25, 9);
        const SessionFeatureSet twice = subsample_rate(set, 0.25, 9);
        CHECK(once.features == twice.features);
    }
    SUBCASE("per-label count") {
        const SessionFeatureSet out = subsample_count(set, 12, 3);
        std::size_t a = 0, b = 0;
        for (const auto& label : out.labels) (label == "a" ? a : b)++;
        CHECK(a == 12);
        CHECK(b == 12);
    }
    SUBCASE("requesting more rows than a label has") {
        CHECK_THROWS_AS(subsample_count(set, 50, 3), ConfigError);
        CHECK_THROWS_AS(subsample_rate(set, 1.5, 3), ConfigError);
    }
}

TEST_CASE("model container: dense net round trip") {
    DenseNet net({3, 5, 2}, {Activation::Relu, Activation::Sigmoid}, 77);
    Matrix x(4, 3);
    RngStream rng(1);
    for (double& v : x.data()) v = rng.uniform(-1, 1);
    Matrix y(4, 2);
    for (double& v : y.data()) v = rng.u01() < 0.5 ? 0.0 : 1.0;
    for (int i = 0; i < 10; ++i) sgd_step(net, x, y, 0.3);

    const auto path = temp_file("io_net.sfeg");
    save_model(path, net);
    CHECK(peek_model_kind(path) == "dense-net");
    CHECK(load_dense_net(path) == net);
}

TEST_CASE("model container: embedding model round trip") {
    SessionFeatureSet set;
    set.features = Matrix::from_rows({{0, 1}, {3, 2}, {7, 0}, {2, 9}, {5, 4}});
    set.labels.assign(5, "l");
    set.column_names = {"alpha", "beta"};
    TrainConfig cfg;
    cfg.epochs = 4;
    cfg.seed = 3;
    const EmbeddingModel model = train_embedding(set, 3, 1, cfg);

    const auto path = temp_file("io_embedding.sfeg");
    save_model(path, model);
    CHECK(peek_model_kind(path) == "embedding-model");
    const EmbeddingModel back = load_embedding_model(path);
    CHECK(back.embedding_dim == model.embedding_dim);
    CHECK(back.window == model.window);
    CHECK(back.bit_widths.widths == model.bit_widths.widths);
    CHECK(back.quantizers == model.quantizers);
    CHECK(back.column_names == model.column_names);
    REQUIRE(back.projections.size() == model.projections.size());
    for (std::size_t i = 0; i < model.projections.size(); ++i)
        CHECK(back.projections[i] == model.projections[i]);

    // loaded model must embed identically
    const EmbeddedSet a = embed(set, model);
    const EmbeddedSet b = embed(set, back);
    CHECK(a == b);
}

TEST_CASE("model container: truncation, bad magic, future version") {
    DenseNet net({2, 2}, {Activation::Sigmoid}, 0);
    const auto path = temp_file("io_broken.sfeg");
    save_model(path, net);

    SUBCASE("truncated file") {
        std::ifstream in(path, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        write_text("io_broken.sfeg", bytes.substr(0, bytes.size() - 5));
        CHECK_THROWS_WITH_AS(load_dense_net(path), doctest::Contains("truncated"), DataError);
    }
    SUBCASE("bad magic") {
        write_text("io_broken.sfeg", "JUNKJUNKJUNK");
        CHECK_THROWS_WITH_AS(load_dense_net(path), doctest::Contains("magic"), DataError);
    }
    SUBCASE("future version is refused with a version report") {
        std::ifstream in(path, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        bytes[4] = 9;
        write_text("io_broken.sfeg", bytes);
        CHECK_THROWS_WITH_AS(load_dense_net(path), doctest::Contains("version 9"), DataError);
    }
    SUBCASE("wrong kind") {
        CHECK_THROWS_WITH_AS(load_embedding_model(path), doctest::Contains("dense-net"),
                             DataError);
    }
}
