#include "commands.hpp"
#include "context.hpp"

#include <sfegacn/data_io.hpp>
#include <sfegacn/log.hpp>

#include <memory>

namespace sfegacn::cli {

namespace {

struct GenerateOptions {
    std::string config;
    std::string model;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    std::string out;
};

void run(const GenerateOptions& opts) {
    Stopwatch watch;
    const GacnModels models = load_gacn_models(opts.model);
    const Matrix rows = generate(models, opts.count, opts.seed);

    EmbeddedSet set;
    set.matrix = rows;
    set.labels.assign(rows.rows(), models.target_label);
    set.generated.assign(rows.rows(), true);
    save_embedded_csv(opts.out, set);
    log::info("generate: " + std::to_string(rows.rows()) + " rows of label '" +
              models.target_label + "'");

    Manifest manifest("generate");
    manifest.set("model", opts.model);
    manifest.set_uint("count", opts.count);
    manifest.set_uint("seed", opts.seed);
    manifest.set("out", opts.out);
    manifest.save(opts.out + ".manifest", watch);
}

} // namespace

void add_generate_command(CLI::App& app) {
    auto opts = std::make_shared<GenerateOptions>();
    CLI::App* sub =
        app.add_subcommand("generate", "Sample rows from a trained generator model");
    sub->add_option("--model", opts->model, "gacn model container");
    sub->add_option("--count", opts->count, "Rows to generate");
    sub->add_option("--seed", opts->seed, "Noise seed");
    sub->add_option("--out", opts->out, "Output embedded CSV");
    sub->add_option("--config", opts->config,
                    "Config file (key = value of these flags; flags win; a run manifest "
                    "feeds back in directly)");
    sub->callback([opts, sub] {
        apply_config_defaults(*sub, opts->config);
        require_option(*sub, "--model");
        require_option(*sub, "--count");
        require_option(*sub, "--out");
        run(*opts);
    });
}

} // namespace sfegacn::cli
