#include "commands.hpp"
#include "context.hpp"

#include <sfegacn/data_io.hpp>
#include <sfegacn/error.hpp>
#include <sfegacn/log.hpp>

#include <memory>

namespace sfegacn::cli {

namespace {

struct SynthOptions {
    std::string config;
    std::string out;
    std::string spec;
    std::size_t classes = 3;
    std::size_t per_class = 100;
    std::size_t dim = 8;
    double spread = 10.0;
    double overlap = 0.0;
    std::uint64_t seed = 0;
};

/// Spec file: overlap/seed plus class.<label>.mean / .var / .count entries.
SynthConfig load_spec(const std::filesystem::path& path, const SynthOptions& opts) {
    ConfigText text;
    try {
        text = ConfigText::load(path);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("synth spec: ") + e.what());
    }
    SynthConfig cfg;
    cfg.overlap = text.get_double("overlap", opts.overlap);
    cfg.seed = text.get_uint("seed", opts.seed);

    std::vector<std::string> labels;
    for (const auto& key : text.keys()) {
        if (key.rfind("class.", 0) != 0) continue;
        const auto dot = key.find('.', 6);
        if (dot == std::string::npos) throw ConfigError("synth spec: malformed key " + key);
        const std::string label = key.substr(6, dot - 6);
        if (std::find(labels.begin(), labels.end(), label) == labels.end())
            labels.push_back(label);
    }
    for (const auto& label : labels) {
        SynthClass cls;
        cls.label = label;
        for (const auto& item : text.get_list("class." + label + ".mean")) {
            const auto v = parse_double(item);
            if (!v) throw ConfigError("synth spec: bad mean entry '" + item + "'");
            cls.mean.push_back(*v);
        }
        for (const auto& item : text.get_list("class." + label + ".var")) {
            const auto v = parse_double(item);
            if (!v) throw ConfigError("synth spec: bad var entry '" + item + "'");
            cls.variance.push_back(*v);
        }
        if (cls.variance.empty()) cls.variance.assign(cls.mean.size(), 1.0);
        cls.count = text.get_uint("class." + label + ".count", 0);
        cfg.classes.push_back(std::move(cls));
    }
    return cfg;
}

/// Flag-only mode: class i sits on axis i mod dim, pushed out by spread
/// (another spread step per wrap), unit variance.
SynthConfig from_flags(const SynthOptions& opts) {
    SynthConfig cfg;
    cfg.overlap = opts.overlap;
    cfg.seed = opts.seed;
    for (std::size_t i = 0; i < opts.classes; ++i) {
        SynthClass cls;
        cls.label = "cat" + std::to_string(i);
        cls.mean.assign(opts.dim, 0.0);
        cls.mean[i % opts.dim] = opts.spread * static_cast<double>(1 + i / opts.dim);
        cls.variance.assign(opts.dim, 1.0);
        cls.count = opts.per_class;
        cfg.classes.push_back(std::move(cls));
    }
    return cfg;
}

void run(const SynthOptions& opts) {
    Stopwatch watch;
    const SynthConfig cfg = opts.spec.empty() ? from_flags(opts) : load_spec(opts.spec, opts);
    const SessionFeatureSet set = synth_generate(cfg);
    save_csv(opts.out, set);
    log::info("synth: wrote " + std::to_string(set.rows()) + " rows to " + opts.out);

    Manifest manifest("synth");
    manifest.set("out", opts.out);
    manifest.set("spec", opts.spec);
    manifest.set_uint("classes", opts.classes);
    manifest.set_uint("per-class", opts.per_class);
    manifest.set_uint("dim", opts.dim);
    manifest.set_double("spread", opts.spread);
    manifest.set_double("overlap", opts.overlap);
    manifest.set_uint("seed", opts.seed);
    manifest.save(opts.out + ".manifest", watch);
}

} // namespace

void add_synth_command(CLI::App& app) {
    auto opts = std::make_shared<SynthOptions>();
    CLI::App* sub = app.add_subcommand("synth", "Generate a synthetic labelled feature CSV");
    sub->add_option("--out", opts->out, "Output CSV path");
    sub->add_option("--spec", opts->spec,
                    "Class spec file (class.<label>.mean/.var/.count entries); overrides the "
                    "simple flags");
    sub->add_option("--classes", opts->classes, "Simple mode: number of classes");
    sub->add_option("--per-class", opts->per_class, "Simple mode: rows per class");
    sub->add_option("--dim", opts->dim, "Simple mode: feature count");
    sub->add_option("--spread", opts->spread, "Simple mode: distance between class means");
    sub->add_option("--overlap", opts->overlap, "Pull class means together: 1/(1+overlap)");
    sub->add_option("--seed", opts->seed, "Master random seed");
    sub->add_option("--config", opts->config,
                    "Config file (key = value of these flags; flags win; a run manifest "
                    "feeds back in directly)");
    sub->callback([opts, sub] {
        apply_config_defaults(*sub, opts->config);
        require_option(*sub, "--out");
        run(*opts);
    });
}

} // namespace sfegacn::cli
