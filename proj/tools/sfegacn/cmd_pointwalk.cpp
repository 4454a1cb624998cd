#include "commands.hpp"
#include "context.hpp"

#include <sfegacn/data_io.hpp>
#include <sfegacn/log.hpp>
#include <sfegacn/pointwalk.hpp>

#include <memory>

namespace sfegacn::cli {

namespace {

struct PointwalkOptions {
    std::string config;
    std::string input;
    std::string label_column = "label";
    std::size_t window_size = 0;
    std::uint64_t seed = 0;
    std::string out;
    std::string svg;
};

void run(const PointwalkOptions& opts) {
    Stopwatch watch;
    const EmbeddedSet points = load_embedded_csv(opts.input, opts.label_column);
    const WalkHistogram histogram = point_walk(points, opts.window_size, opts.seed);
    emit_histogram_csv(histogram, opts.out);
    if (!opts.svg.empty()) emit_histogram_svg(histogram, opts.svg);
    log::info("pointwalk: " + std::to_string(histogram.visit_order.size()) + " points, " +
              std::to_string(histogram.windows.size()) + " windows");

    Manifest manifest("pointwalk");
    manifest.set("input", opts.input);
    manifest.set("label-column", opts.label_column);
    manifest.set_uint("window-size", opts.window_size);
    manifest.set_uint("seed", opts.seed);
    manifest.set("out", opts.out);
    manifest.set("svg", opts.svg);
    manifest.save(opts.out + ".manifest", watch);
}

} // namespace

void add_pointwalk_command(CLI::App& app) {
    auto opts = std::make_shared<PointwalkOptions>();
    CLI::App* sub = app.add_subcommand(
        "pointwalk",
        "Chain all rows by nearest unvisited neighbour and histogram their labels per window");
    sub->add_option("--input", opts->input, "Embedded CSV with labels");
    sub->add_option("--label-column", opts->label_column, "Label column name");
    sub->add_option("--window-size", opts->window_size, "Visits per histogram window");
    sub->add_option("--seed", opts->seed, "Start-point seed");
    sub->add_option("--out", opts->out, "Histogram CSV output path");
    sub->add_option("--svg", opts->svg, "Optional SVG chart output path");
    sub->add_option("--config", opts->config,
                    "Config file (key = value of these flags; flags win; a run manifest "
                    "feeds back in directly)");
    sub->callback([opts, sub] {
        apply_config_defaults(*sub, opts->config);
        require_option(*sub, "--input");
        require_option(*sub, "--window-size");
        require_option(*sub, "--out");
        run(*opts);
    });
}

} // namespace sfegacn::cli
