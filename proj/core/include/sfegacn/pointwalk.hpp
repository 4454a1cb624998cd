#pragma once

#include "sfegacn/dataset.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace sfegacn {

/// Label counts gathered while chaining through every point by nearest
/// unvisited neighbour, flushed into a new window every window_size visits.
struct WalkHistogram {
    std::size_t window_size = 0;
    std::vector<std::map<std::string, std::size_t>> windows;
    std::vector<std::size_t> visit_order; // permutation of row ids
};

/// Walks from a seeded random start row; every step moves to the nearest
/// not-yet-visited row by Euclidean distance (ties toward the lower row
/// index). Every visited point's label is counted, the start included; a
/// partial final window is kept. Needs at least two rows.
WalkHistogram point_walk(const EmbeddedSet& points, std::size_t window_size, std::uint64_t seed);

/// Same walk from an explicit start row (the seeded variant picks the start
/// and delegates here).
WalkHistogram point_walk_from(const EmbeddedSet& points, std::size_t window_size,
                              std::size_t start_row);

/// CSV export: window_index,label,count — one row per (window, label) pair.
void emit_histogram_csv(const WalkHistogram& histogram, const std::filesystem::path& path);

/// Minimal SVG line chart, one polyline per label over the window index.
void emit_histogram_svg(const WalkHistogram& histogram, const std::filesystem::path& path);

} // namespace sfegacn
