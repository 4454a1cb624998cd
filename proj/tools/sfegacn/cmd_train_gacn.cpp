#include "commands.hpp"
#include "context.hpp"

#include <sfegacn/data_io.hpp>
#include <sfegacn/gacn.hpp>
#include <sfegacn/log.hpp>

#include <memory>

namespace sfegacn::cli {

namespace {

struct TrainGacnOptions {
    std::string config;
    std::string input;
    std::string label_column = "label";
    std::string target;
    std::size_t iterations = 500;
    std::size_t noise_dim = 8;
    std::size_t batch = 32;
    double lr = 0.05;
    std::size_t disc_epochs = 1;
    std::size_t backup_cycle = 10;
    std::size_t rollback_window = 20;
    double rollback_coeff = 0.5;
    double drop_tolerance = 0.01;
    std::string noise_mode = "gaussian";
    std::string gen_hidden = "16,16";
    std::string disc_hidden = "16";
    std::uint64_t seed = 0;
    std::string out;
    std::string history;
};

GacnConfig to_config(const TrainGacnOptions& opts) {
    GacnConfig cfg;
    cfg.target_label = opts.target;
    cfg.iterations = opts.iterations;
    cfg.noise_dim = opts.noise_dim;
    cfg.batch_size = opts.batch;
    cfg.learning_rate = opts.lr;
    cfg.disc_epochs = opts.disc_epochs;
    cfg.backup_cycle = opts.backup_cycle;
    cfg.rollback_window = opts.rollback_window;
    cfg.rollback_coeff = opts.rollback_coeff;
    cfg.drop_tolerance = opts.drop_tolerance;
    cfg.noise_mode = noise_mode_from_name(opts.noise_mode);
    cfg.gen_hidden = parse_hidden_dims(opts.gen_hidden);
    cfg.disc_hidden = parse_hidden_dims(opts.disc_hidden);
    cfg.seed = opts.seed;
    return cfg;
}

void run(const TrainGacnOptions& opts) {
    Stopwatch watch;
    const EmbeddedSet embedded = load_embedded_csv(opts.input, opts.label_column);
    const GacnConfig cfg = to_config(opts);
    const GacnModels models = train_gacn(embedded, cfg);

    save_model(opts.out, models);
    const std::string history_path =
        opts.history.empty() ? opts.out + ".history.csv" : opts.history;
    write_history_csv(history_path, models.history);

    std::size_t rollbacks = 0;
    for (const auto& record : models.history) rollbacks += record.rollback ? 1 : 0;
    log::info("train-gacn: " + std::to_string(cfg.iterations) + " iterations, " +
              std::to_string(rollbacks) + " rollbacks");

    Manifest manifest("train-gacn");
    manifest.set("input", opts.input);
    manifest.set("label-column", opts.label_column);
    manifest.set("target", opts.target);
    manifest.set_uint("iterations", opts.iterations);
    manifest.set_uint("noise-dim", opts.noise_dim);
    manifest.set_uint("batch", opts.batch);
    manifest.set_double("lr", opts.lr);
    manifest.set_uint("disc-epochs", opts.disc_epochs);
    manifest.set_uint("backup-cycle", opts.backup_cycle);
    manifest.set_uint("rollback-window", opts.rollback_window);
    manifest.set_double("rollback-coeff", opts.rollback_coeff);
    manifest.set_double("drop-tolerance", opts.drop_tolerance);
    manifest.set("noise-mode", opts.noise_mode);
    manifest.set("gen-hidden", opts.gen_hidden);
    manifest.set("disc-hidden", opts.disc_hidden);
    manifest.set_uint("seed", opts.seed);
    manifest.set("out", opts.out);
    manifest.set("history", history_path);
    manifest.save(opts.out + ".manifest", watch);
}

} // namespace

void add_train_gacn_command(CLI::App& app) {
    auto opts = std::make_shared<TrainGacnOptions>();
    CLI::App* sub = app.add_subcommand(
        "train-gacn",
        "Train an intra-category generator for one target label of an embedded CSV");
    sub->add_option("--input", opts->input, "Embedded CSV with labels");
    sub->add_option("--label-column", opts->label_column, "Label column name");
    sub->add_option("--target", opts->target, "Label to generate (everything else is side)");
    sub->add_option("--iterations", opts->iterations, "Outer training iterations");
    sub->add_option("--noise-dim", opts->noise_dim, "Generator input width (gaussian mode)");
    sub->add_option("--batch", opts->batch, "Batch size r");
    sub->add_option("--lr", opts->lr, "Learning rate");
    sub->add_option("--disc-epochs", opts->disc_epochs,
                    "Discriminator epochs per iteration (k)");
    sub->add_option("--backup-cycle", opts->backup_cycle,
                    "Iterations between generator backups (cy_b)");
    sub->add_option("--rollback-window", opts->rollback_window,
                    "Iterations the cooperative score gets to drop (e_r)");
    sub->add_option("--rollback-coeff", opts->rollback_coeff,
                    "Interpolation weight toward the backup (c_r)");
    sub->add_option("--drop-tolerance", opts->drop_tolerance,
                    "Required score drop; inf disables rollback");
    sub->add_option("--noise-mode", opts->noise_mode, "gaussian or side-plus-noise");
    sub->add_option("--gen-hidden", opts->gen_hidden, "Generator hidden widths, comma separated");
    sub->add_option("--disc-hidden", opts->disc_hidden,
                    "Discriminator hidden widths, comma separated");
    sub->add_option("--seed", opts->seed, "Master random seed");
    sub->add_option("--out", opts->out, "Model container output path");
    sub->add_option("--history", opts->history,
                    "Score history CSV path (default: <out>.history.csv)");
    sub->add_option("--config", opts->config,
                    "Config file (key = value of these flags; flags win; a run manifest "
                    "feeds back in directly)");
    sub->callback([opts, sub] {
        apply_config_defaults(*sub, opts->config);
        require_option(*sub, "--input");
        require_option(*sub, "--target");
        require_option(*sub, "--out");
        run(*opts);
    });
}

} // namespace sfegacn::cli
