#include "sfegacn/dataset.hpp"

#include <algorithm>

namespace sfegacn {

std::vector<std::size_t> EmbeddedSet::rows_with_label(const std::string& label) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) out.push_back(i);
    return out;
}

std::vector<std::size_t> EmbeddedSet::rows_with_other_label(const std::string& label) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] != label && labels[i] != kUnlabeled) out.push_back(i);
    return out;
}

std::vector<std::string> EmbeddedSet::known_labels() const {
    std::vector<std::string> out;
    for (const auto& label : labels) {
        if (label == kUnlabeled) continue;
        if (std::find(out.begin(), out.end(), label) == out.end()) out.push_back(label);
    }
    return out;
}

void EmbeddedSet::append_row(std::span<const double> values, const std::string& label,
                             bool was_generated) {
    Matrix row(1, values.size());
    row.set_row(0, values);
    matrix.append_rows(row);
    labels.push_back(label);
    generated.push_back(was_generated);
}

} // namespace sfegacn
