#include <benchmark/benchmark.h>

#include <sfegacn/detector.hpp>
#include <sfegacn/nn.hpp>
#include <sfegacn/pointwalk.hpp>
#include <sfegacn/rng.hpp>
#include <sfegacn/sfe.hpp>

using namespace sfegacn;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Matrix m(rows, cols);
    RngStream rng(seed);
    for (double& v : m.data()) v = rng.uniform(-1, 1);
    return m;
}

void BM_DenseForward(benchmark::State& state) {
    const std::size_t batch = static_cast<std::size_t>(state.range(0));
    DenseNet net({64, 32, 16, 1},
                 {Activation::Relu, Activation::Relu, Activation::Sigmoid}, 1);
    const Matrix x = random_matrix(batch, 64, 2);
    for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_DenseForward)->Arg(16)->Arg(128)->Arg(1024);

void BM_SgdStep(benchmark::State& state) {
    const std::size_t batch = static_cast<std::size_t>(state.range(0));
    DenseNet net({32, 32, 8}, {Activation::Relu, Activation::Sigmoid}, 1);
    const Matrix x = random_matrix(batch, 32, 3);
    Matrix y(batch, 8);
    RngStream rng(4);
    for (double& v : y.data()) v = rng.u01() < 0.5 ? 0.0 : 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(sgd_step(net, x, y, 1e-6));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_SgdStep)->Arg(16)->Arg(128);

void BM_Kmeans(benchmark::State& state) {
    const std::size_t rows = static_cast<std::size_t>(state.range(0));
    const Matrix points = random_matrix(rows, 16, 5);
    KmeansParams params;
    params.clusters = 8;
    params.seed = 3;
    for (auto _ : state) benchmark::DoNotOptimize(kmeans(points, params));
}
BENCHMARK(BM_Kmeans)->Arg(256)->Arg(2048);

void BM_PointWalk(benchmark::State& state) {
    const std::size_t rows = static_cast<std::size_t>(state.range(0));
    EmbeddedSet set;
    set.matrix = random_matrix(rows, 8, 6);
    set.labels.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) set.labels.push_back("l" + std::to_string(r % 5));
    set.generated.assign(rows, false);
    for (auto _ : state) benchmark::DoNotOptimize(point_walk(set, 50, 7));
}
BENCHMARK(BM_PointWalk)->Arg(200)->Arg(1000);

void BM_TrainEmbedding(benchmark::State& state) {
    const std::size_t rows = static_cast<std::size_t>(state.range(0));
    SessionFeatureSet set;
    set.features = Matrix(rows, 4);
    RngStream rng(8);
    for (double& v : set.features.data()) v = static_cast<double>(rng.uniform_index(256));
    set.labels.assign(rows, "l");
    set.column_names = {"a", "b", "c", "d"};
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.seed = 2;
    for (auto _ : state) benchmark::DoNotOptimize(train_embedding(set, 8, 2, cfg));
}
BENCHMARK(BM_TrainEmbedding)->Arg(200);

void BM_EmbedApply(benchmark::State& state) {
    const std::size_t rows = static_cast<std::size_t>(state.range(0));
    SessionFeatureSet set;
    set.features = Matrix(rows, 8);
    RngStream rng(9);
    for (double& v : set.features.data()) v = static_cast<double>(rng.uniform_index(1024));
    set.labels.assign(rows, "l");
    for (std::size_t c = 0; c < 8; ++c) set.column_names.push_back("f" + std::to_string(c));
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.seed = 3;
    const EmbeddingModel model = train_embedding(set, 8, 2, cfg);
    for (auto _ : state) benchmark::DoNotOptimize(embed(set, model));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}
BENCHMARK(BM_EmbedApply)->Arg(1000);

} // namespace

BENCHMARK_MAIN();
