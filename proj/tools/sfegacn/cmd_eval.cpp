#include "commands.hpp"
#include "context.hpp"

#include <sfegacn/classifier.hpp>
#include <sfegacn/data_io.hpp>
#include <sfegacn/error.hpp>
#include <sfegacn/gacn.hpp>
#include <sfegacn/log.hpp>
#include <sfegacn/rng.hpp>

#include <fstream>
#include <limits>
#include <memory>

namespace sfegacn::cli {

namespace {

struct EvalOptions {
    std::string config;
    std::string scenario;
    std::string out;
};

struct Scenario {
    std::filesystem::path labeled;
    std::filesystem::path test;
    std::string label_column = "label";
    std::vector<std::string> variants;
    std::size_t gen_count = 100;
    std::uint64_t seed = 0;
    std::vector<std::size_t> classifier_hidden = {32};
    TrainConfig classifier;
    GacnConfig gacn;
};

Scenario load_scenario(const std::filesystem::path& path) {
    const ConfigText text = ConfigText::load(path);
    const std::filesystem::path base = path.parent_path();

    Scenario s;
    s.variants = text.get_list("variants");
    for (const auto& variant : s.variants)
        if (variant != "gacn" && variant != "gan" && variant != "none")
            throw ConfigError("eval scenario: unknown variant '" + variant +
                              "' (expected gacn, gan or none)");
    if (!s.variants.empty()) {
        s.labeled = base / text.require("labeled");
        s.test = base / text.require("test");
    }
    s.label_column = text.get_or("label-column", "label");
    s.gen_count = text.get_uint("gen-count", 100);
    s.seed = text.get_uint("seed", 0);
    s.classifier_hidden = parse_hidden_dims(text.get_or("classifier-hidden", "32"));
    s.classifier.epochs = text.get_uint("classifier-epochs", 150);
    s.classifier.learning_rate = text.get_double("classifier-lr", 0.1);
    s.classifier.batch_size = text.get_uint("classifier-batch", 16);
    s.gacn.iterations = text.get_uint("gacn-iterations", 400);
    s.gacn.learning_rate = text.get_double("gacn-lr", 0.05);
    s.gacn.batch_size = text.get_uint("gacn-batch", 32);
    s.gacn.noise_dim = text.get_uint("gacn-noise-dim", 8);
    s.gacn.gen_hidden = parse_hidden_dims(text.get_or("gacn-gen-hidden", "16,16"));
    s.gacn.disc_hidden = parse_hidden_dims(text.get_or("gacn-disc-hidden", "16"));
    s.gacn.disc_epochs = text.get_uint("gacn-disc-epochs", 1);
    s.gacn.backup_cycle = text.get_uint("gacn-backup-cycle", 10);
    s.gacn.rollback_window = text.get_uint("gacn-rollback-window", 20);
    s.gacn.rollback_coeff = text.get_double("gacn-rollback-coeff", 0.5);
    s.gacn.drop_tolerance = text.get_double("gacn-drop-tolerance", 0.01);
    return s;
}

/// All variants share the scenario seed; gan is the same augmentation loop
/// with rollback disabled, none skips augmentation entirely.
double run_variant(const std::string& variant, const Scenario& s, const EmbeddedSet& labeled,
                   const EmbeddedSet& test) {
    EmbeddedSet train = labeled;
    if (variant != "none") {
        GacnConfig cfg = s.gacn;
        cfg.seed = s.seed;
        if (variant == "gan") cfg.drop_tolerance = std::numeric_limits<double>::infinity();
        std::vector<LabelCount> counts;
        for (const auto& label : labeled.known_labels()) counts.push_back({label, s.gen_count});
        train = augment_all(labeled, counts, cfg);
    }

    TrainConfig cls = s.classifier;
    cls.seed = derive_seed(s.seed, "eval:classifier");
    const LabelClassifier classifier = train_label_classifier(train, s.classifier_hidden, cls);
    const auto predicted = predict_labels(classifier, test.matrix);
    return macro_f1(predicted, test.labels, classifier.labels);
}

void run(const EvalOptions& opts) {
    Stopwatch watch;
    const Scenario scenario = load_scenario(opts.scenario);

    std::ofstream out(opts.out, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + opts.out);
    out << "variant,f1,seconds\n";

    if (!scenario.variants.empty()) {
        const EmbeddedSet labeled =
            load_embedded_csv(scenario.labeled, scenario.label_column);
        const EmbeddedSet test = load_embedded_csv(scenario.test, scenario.label_column);
        for (const auto& variant : scenario.variants) {
            Stopwatch lap;
            const double f1 = run_variant(variant, scenario, labeled, test);
            const double seconds = static_cast<double>(lap.elapsed_ms()) / 1000.0;
            out << variant << ',' << format_double(f1) << ',' << format_double(seconds) << '\n';
            log::info("eval: " + variant + " f1 = " + format_double(f1));
        }
    }
    if (!out) throw IoError("write failed: " + opts.out);
    out.close();

    Manifest manifest("eval");
    manifest.set("scenario", opts.scenario);
    manifest.set("out", opts.out);
    manifest.save(opts.out + ".manifest", watch);
}

} // namespace

void add_eval_command(CLI::App& app) {
    auto opts = std::make_shared<EvalOptions>();
    CLI::App* sub = app.add_subcommand(
        "eval", "Compare augmentation variants (gacn / gan / none) by classifier f1");
    sub->add_option("--scenario", opts->scenario, "Scenario file (key = value)");
    sub->add_option("--out", opts->out, "Result CSV path");
    sub->add_option("--config", opts->config,
                    "Config file (key = value of these flags; flags win; a run manifest "
                    "feeds back in directly)");
    sub->callback([opts, sub] {
        apply_config_defaults(*sub, opts->config);
        require_option(*sub, "--scenario");
        require_option(*sub, "--out");
        run(*opts);
    });
}

} // namespace sfegacn::cli
