#pragma once

#include "sfegacn/matrix.hpp"

#include <string>
#include <vector>

namespace sfegacn {

/// Label value marking rows without a category.
inline const std::string kUnlabeled = "unlabeled";

/// Raw numeric session features: one row per session, one labelled category
/// per row (possibly kUnlabeled).
struct SessionFeatureSet {
    Matrix features;
    std::vector<std::string> column_names;
    std::vector<std::string> labels;
    std::string source;

    std::size_t rows() const { return features.rows(); }
    std::size_t feature_count() const { return features.cols(); }
};

/// Rows mapped into embedding space. `generated` marks rows produced by a
/// generator rather than observed.
struct EmbeddedSet {
    Matrix matrix;
    std::vector<std::string> labels;
    std::vector<bool> generated;

    std::size_t rows() const { return matrix.rows(); }
    std::size_t dim() const { return matrix.cols(); }

    bool operator==(const EmbeddedSet& other) const = default;

    /// Indices of rows carrying the given label.
    std::vector<std::size_t> rows_with_label(const std::string& label) const;

    /// Indices of labelled rows with any label other than the given one
    /// (kUnlabeled rows excluded).
    std::vector<std::size_t> rows_with_other_label(const std::string& label) const;

    /// Distinct labels except kUnlabeled, in first-appearance order.
    std::vector<std::string> known_labels() const;

    void append_row(std::span<const double> values, const std::string& label, bool was_generated);
};

} // namespace sfegacn
