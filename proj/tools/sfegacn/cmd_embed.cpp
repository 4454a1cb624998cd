#include "commands.hpp"
#include "context.hpp"

#include <sfegacn/data_io.hpp>
#include <sfegacn/log.hpp>
#include <sfegacn/rng.hpp>
#include <sfegacn/sfe.hpp>

#include <memory>

namespace sfegacn::cli {

namespace {

struct EmbedOptions {
    std::string config;
    std::string input;
    std::string apply;
    std::string label_column = "label";
    std::size_t embedding_dim = 0;
    std::size_t window = 0;
    std::size_t epochs = 30;
    std::size_t batch = 32;
    double lr = 0.1;
    std::uint64_t seed = 0;
    std::string model_out;
    std::string out;
};

void run(const EmbedOptions& opts) {
    Stopwatch watch;
    const auto label_column = label_column_option(opts.label_column);
    const SessionFeatureSet train_set = load_csv(opts.input, label_column);

    TrainConfig cfg;
    cfg.learning_rate = opts.lr;
    cfg.batch_size = opts.batch;
    cfg.epochs = opts.epochs;
    cfg.seed = derive_seed(opts.seed, "embed:train");

    const EmbeddingModel model = train_embedding(train_set, opts.embedding_dim, opts.window, cfg);
    const std::string model_path =
        opts.model_out.empty() ? opts.out + ".model.sfeg" : opts.model_out;
    save_model(model_path, model);

    const SessionFeatureSet apply_set =
        opts.apply.empty() || opts.apply == opts.input ? train_set
                                                       : load_csv(opts.apply, label_column);
    EmbedStats stats;
    const EmbeddedSet embedded = embed(apply_set, model, &stats);
    save_embedded_csv(opts.out, embedded);
    log::info("embed: " + std::to_string(embedded.rows()) + " rows -> " +
              std::to_string(embedded.dim()) + " embedded columns");

    Manifest manifest("embed");
    manifest.set("input", opts.input);
    manifest.set("apply", opts.apply);
    manifest.set("label-column", opts.label_column);
    manifest.set_uint("embedding-dim", opts.embedding_dim);
    manifest.set_uint("window", opts.window);
    manifest.set_uint("epochs", opts.epochs);
    manifest.set_uint("batch", opts.batch);
    manifest.set_double("lr", opts.lr);
    manifest.set_uint("seed", opts.seed);
    manifest.set("model-out", model_path);
    manifest.set("out", opts.out);
    manifest.set_uint("clamped-values", stats.clamped_values);
    manifest.save(opts.out + ".manifest", watch);
}

} // namespace

void add_embed_command(CLI::App& app) {
    auto opts = std::make_shared<EmbedOptions>();
    CLI::App* sub = app.add_subcommand(
        "embed", "Train a session-feature embedding and map a feature CSV into embedding space");
    sub->add_option("--input", opts->input, "Training feature CSV");
    sub->add_option("--apply", opts->apply,
                    "Feature CSV to embed with the trained model (default: the training file)");
    sub->add_option("--label-column", opts->label_column,
                    "Label column name; empty for unlabeled data");
    sub->add_option("--embedding-dim", opts->embedding_dim, "Embedding width per feature (N)");
    sub->add_option("--window", opts->window, "Context rows on each side (c)");
    sub->add_option("--epochs", opts->epochs, "Training epochs per feature column");
    sub->add_option("--batch", opts->batch, "Batch size");
    sub->add_option("--lr", opts->lr, "Learning rate");
    sub->add_option("--seed", opts->seed, "Master random seed");
    sub->add_option("--model-out", opts->model_out,
                    "Embedding model output path (default: <out>.model.sfeg)");
    sub->add_option("--out", opts->out, "Embedded CSV output path");
    sub->add_option("--config", opts->config,
                    "Config file (key = value of these flags; flags win; a run manifest "
                    "feeds back in directly)");
    sub->callback([opts, sub] {
        apply_config_defaults(*sub, opts->config);
        require_option(*sub, "--input");
        require_option(*sub, "--embedding-dim");
        require_option(*sub, "--window");
        require_option(*sub, "--out");
        run(*opts);
    });
}

} // namespace sfegacn::cli
