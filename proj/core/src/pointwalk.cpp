#include "sfegacn/pointwalk.hpp"

#include "sfegacn/error.hpp"
#include "sfegacn/matrix.hpp"
#include "sfegacn/rng.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>

namespace sfegacn {

WalkHistogram point_walk(const EmbeddedSet& points, std::size_t window_size, std::uint64_t seed) {
    if (points.rows() < 2) throw ConfigError("point_walk: need at least two rows");
    RngStream rng(derive_seed(seed, "pointwalk:start"));
    return point_walk_from(points, window_size, rng.uniform_index(points.rows()));
}

WalkHistogram point_walk_from(const EmbeddedSet& points, std::size_t window_size,
                              std::size_t start_row) {
    const std::size_t n = points.rows();
    if (n < 2) throw ConfigError("point_walk: need at least two rows");
    if (window_size == 0) throw ConfigError("point_walk: window_size must be positive");
    if (start_row >= n) throw ConfigError("point_walk: start row out of range");

    WalkHistogram histogram;
    histogram.window_size = window_size;
    histogram.visit_order.reserve(n);

    std::vector<bool> visited(n, false);
    std::map<std::string, std::size_t> in_window;
    std::size_t in_window_count = 0;

    std::size_t current = start_row;
    for (std::size_t step = 0; step < n; ++step) {
        visited[current] = true;
        histogram.visit_order.push_back(current);
        ++in_window[points.labels[current]];
        if (++in_window_count == window_size) {
            histogram.windows.push_back(std::move(in_window));
            in_window.clear();
            in_window_count = 0;
        }
        if (step + 1 == n) break;

        // Nearest unvisited row; ties go to the lower index.
        double best = std::numeric_limits<double>::infinity();
        std::size_t next = n;
        for (std::size_t r = 0; r < n; ++r) {
            if (visited[r]) continue;
            const double d = squared_distance(points.matrix.row(current), points.matrix.row(r));
            if (d < best) {
                best = d;
                next = r;
            }
        }
        current = next;
    }
    if (in_window_count > 0) histogram.windows.push_back(std::move(in_window));
    return histogram;
}

void emit_histogram_csv(const WalkHistogram& histogram, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path.string());
    out << "window_index,label,count\n";
    for (std::size_t w = 0; w < histogram.windows.size(); ++w)
        for (const auto& [label, count] : histogram.windows[w])
            out << w << ',' << label << ',' << count << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

void emit_histogram_svg(const WalkHistogram& histogram, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path.string());

    std::set<std::string> labels;
    std::size_t peak = 1;
    for (const auto& window : histogram.windows)
        for (const auto& [label, count] : window) {
            labels.insert(label);
            peak = std::max(peak, count);
        }

    const double width = 640.0, height = 400.0, margin = 48.0;
    const double plot_w = width - 2 * margin, plot_h = height - 2 * margin;
    const std::size_t windows = std::max<std::size_t>(histogram.windows.size(), 1);
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
        << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
        << height - margin << "\" stroke=\"black\"/>\n";

    std::size_t color = 0;
    double legend_y = margin;
    for (const auto& label : labels) {
        out << "<polyline fill=\"none\" stroke=\"" << palette[color % 8] << "\" points=\"";
        for (std::size_t w = 0; w < histogram.windows.size(); ++w) {
            const auto it = histogram.windows[w].find(label);
            const double count = it == histogram.windows[w].end()
                                     ? 0.0
                                     : static_cast<double>(it->second);
            const double x =
                margin + plot_w * (windows > 1 ? static_cast<double>(w) / (windows - 1) : 0.5);
            const double y = height - margin - plot_h * count / static_cast<double>(peak);
            out << x << ',' << y << ' ';
        }
        out << "\"/>\n";
        out << "<text x=\"" << width - margin + 4 << "\" y=\"" << legend_y << "\" fill=\""
            << palette[color % 8] << "\" font-size=\"10\">" << label << "</text>\n";
        legend_y += 14.0;
        ++color;
    }
    out << "</svg>\n";
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace sfegacn
