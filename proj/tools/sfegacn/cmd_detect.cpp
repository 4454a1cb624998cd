#include "commands.hpp"
#include "context.hpp"

#include <sfegacn/data_io.hpp>
#include <sfegacn/detector.hpp>
#include <sfegacn/error.hpp>
#include <sfegacn/log.hpp>

#include <fstream>
#include <memory>

namespace sfegacn::cli {

namespace {

struct DetectOptions {
    std::string config;
    std::string labeled;
    std::string unlabeled;
    std::string label_column = "label";
    std::size_t clusters = 0;
    double delta = 0.1;
    std::size_t gen_count = 0;
    std::string gen_counts;
    bool baseline = false;
    std::uint64_t seed = 0;
    std::string out;
    // classifier
    std::string classifier_hidden = "32";
    std::size_t classifier_epochs = 150;
    double classifier_lr = 0.1;
    std::size_t classifier_batch = 32;
    // augmentation
    std::size_t gacn_iterations = 400;
    double gacn_lr = 0.05;
    std::size_t gacn_batch = 32;
    std::size_t gacn_noise_dim = 8;
    std::string gacn_gen_hidden = "16,16";
    std::string gacn_disc_hidden = "16";
};

void write_id_list(const std::filesystem::path& path, const std::vector<std::size_t>& ids) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path.string());
    out << "row_id\n";
    for (std::size_t id : ids) out << id << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

void run(const DetectOptions& opts) {
    Stopwatch watch;
    const EmbeddedSet labeled = load_embedded_csv(opts.labeled, opts.label_column);
    const EmbeddedSet unlabeled = load_embedded_csv(opts.unlabeled, opts.label_column);

    DetectionConfig cfg;
    cfg.clusters = opts.clusters;
    cfg.delta = opts.delta;
    cfg.baseline_only = opts.baseline;
    cfg.seed = opts.seed;
    cfg.classifier.hidden = parse_hidden_dims(opts.classifier_hidden);
    cfg.classifier.train.epochs = opts.classifier_epochs;
    cfg.classifier.train.learning_rate = opts.classifier_lr;
    cfg.classifier.train.batch_size = opts.classifier_batch;
    cfg.gacn.iterations = opts.gacn_iterations;
    cfg.gacn.learning_rate = opts.gacn_lr;
    cfg.gacn.batch_size = opts.gacn_batch;
    cfg.gacn.noise_dim = opts.gacn_noise_dim;
    cfg.gacn.gen_hidden = parse_hidden_dims(opts.gacn_gen_hidden);
    cfg.gacn.disc_hidden = parse_hidden_dims(opts.gacn_disc_hidden);

    // --gen-counts wins over the uniform --gen-count.
    if (!opts.gen_counts.empty()) {
        for (const auto& [label, count] : parse_label_counts(opts.gen_counts))
            cfg.generation.push_back({label, count});
    } else if (opts.gen_count > 0) {
        for (const auto& label : labeled.known_labels())
            cfg.generation.push_back({label, opts.gen_count});
    }

    const DetectionReport report = detect(labeled, unlabeled, cfg);

    std::filesystem::create_directories(opts.out);
    const std::filesystem::path out_dir(opts.out);
    write_detection_report(out_dir / "report.txt", report);
    write_id_list(out_dir / "h1.csv", report.h1);
    write_id_list(out_dir / "h2.csv", report.h2);

    std::string summary = "detect: |H1| = " + std::to_string(report.h1.size()) +
                          ", |H2| = " + std::to_string(report.h2.size());
    if (report.metrics_h2 && report.metrics_h2->tpr)
        summary += ", TPR = " + format_double(*report.metrics_h2->tpr);
    if (report.metrics_h2 && report.metrics_h2->fpr)
        summary += ", FPR = " + format_double(*report.metrics_h2->fpr);
    log::info(summary);

    Manifest manifest("detect");
    manifest.set("labeled", opts.labeled);
    manifest.set("unlabeled", opts.unlabeled);
    manifest.set("label-column", opts.label_column);
    manifest.set_uint("clusters", opts.clusters);
    manifest.set_double("delta", opts.delta);
    manifest.set_uint("gen-count", opts.gen_count);
    manifest.set("gen-counts", opts.gen_counts);
    manifest.set("baseline", opts.baseline ? "true" : "false");
    manifest.set_uint("seed", opts.seed);
    manifest.set("classifier-hidden", opts.classifier_hidden);
    manifest.set_uint("classifier-epochs", opts.classifier_epochs);
    manifest.set_double("classifier-lr", opts.classifier_lr);
    manifest.set_uint("classifier-batch", opts.classifier_batch);
    manifest.set_uint("gacn-iterations", opts.gacn_iterations);
    manifest.set_double("gacn-lr", opts.gacn_lr);
    manifest.set_uint("gacn-batch", opts.gacn_batch);
    manifest.set_uint("gacn-noise-dim", opts.gacn_noise_dim);
    manifest.set("gacn-gen-hidden", opts.gacn_gen_hidden);
    manifest.set("gacn-disc-hidden", opts.gacn_disc_hidden);
    manifest.set("out", opts.out);
    manifest.save(out_dir / "manifest.txt", watch);
}

} // namespace

void add_detect_command(CLI::App& app) {
    auto opts = std::make_shared<DetectOptions>();
    CLI::App* sub = app.add_subcommand(
        "detect", "Mine unknown-category rows from an unlabeled embedded CSV");
    sub->add_option("--labeled", opts->labeled, "Labelled embedded CSV");
    sub->add_option("--unlabeled", opts->unlabeled,
                    "Embedded CSV to mine; its label column, when present, is used as ground "
                    "truth for metrics");
    sub->add_option("--label-column", opts->label_column, "Label column name");
    sub->add_option("--clusters", opts->clusters,
                    "k-means cluster count (0 = twice the known labels)");
    sub->add_option("--delta", opts->delta, "Intra-cluster labelled-share threshold");
    sub->add_option("--gen-count", opts->gen_count, "Generated rows per label");
    sub->add_option("--gen-counts", opts->gen_counts,
                    "Per-label counts, e.g. dos:200,probe:50 (wins over --gen-count)");
    sub->add_flag("--baseline", opts->baseline, "First step only: H2 = H1");
    sub->add_option("--seed", opts->seed, "Master random seed");
    sub->add_option("--out", opts->out, "Output directory");
    sub->add_option("--classifier-hidden", opts->classifier_hidden,
                    "Second-step classifier hidden widths");
    sub->add_option("--classifier-epochs", opts->classifier_epochs, "Second-step epochs");
    sub->add_option("--classifier-lr", opts->classifier_lr, "Second-step learning rate");
    sub->add_option("--classifier-batch", opts->classifier_batch, "Second-step batch size");
    sub->add_option("--gacn-iterations", opts->gacn_iterations, "Augmentation iterations");
    sub->add_option("--gacn-lr", opts->gacn_lr, "Augmentation learning rate");
    sub->add_option("--gacn-batch", opts->gacn_batch, "Augmentation batch size");
    sub->add_option("--gacn-noise-dim", opts->gacn_noise_dim, "Augmentation noise width");
    sub->add_option("--gacn-gen-hidden", opts->gacn_gen_hidden, "Generator hidden widths");
    sub->add_option("--gacn-disc-hidden", opts->gacn_disc_hidden, "Discriminator hidden widths");
    sub->add_option("--config", opts->config,
                    "Config file (key = value of these flags; flags win; a run manifest "
                    "feeds back in directly)");
    sub->callback([opts, sub] {
        apply_config_defaults(*sub, opts->config);
        require_option(*sub, "--labeled");
        require_option(*sub, "--unlabeled");
        require_option(*sub, "--out");
        run(*opts);
    });
}

} // namespace sfegacn::cli
