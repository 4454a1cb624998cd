#include "sfegacn/classifier.hpp"

#include "sfegacn/error.hpp"
#include "sfegacn/rng.hpp"

#include <algorithm>

namespace sfegacn {

namespace {

std::size_t label_index(const std::vector<std::string>& labels, const std::string& label) {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw ConfigError("classifier: unknown label '" + label + "'");
    return static_cast<std::size_t>(it - labels.begin());
}

} // namespace

LabelClassifier train_label_classifier(const EmbeddedSet& data,
                                       const std::vector<std::size_t>& hidden,
                                       const TrainConfig& cfg) {
    cfg.validate();
    LabelClassifier out;
    out.labels = data.known_labels();
    if (out.labels.empty()) throw ConfigError("classifier: no labelled rows to train on");

    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < data.rows(); ++r)
        if (data.labels[r] != kUnlabeled) rows.push_back(r);

    const Matrix x = data.matrix.gather_rows(rows);
    Matrix y(rows.size(), out.labels.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        y(i, label_index(out.labels, data.labels[rows[i]])) = 1.0;

    std::vector<std::size_t> dims{x.cols()};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(out.labels.size());
    std::vector<Activation> acts(hidden.size(), Activation::Relu);
    acts.push_back(Activation::Softmax);
    out.net = DenseNet(dims, acts, derive_seed(cfg.seed, "classifier:init"));

    RngStream shuffler(derive_seed(cfg.seed, "classifier:shuffle"));
    std::vector<std::size_t> ordering(x.rows());
    for (std::size_t i = 0; i < ordering.size(); ++i) ordering[i] = i;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffler.shuffle(ordering);
        for (std::size_t begin = 0; begin < ordering.size(); begin += cfg.batch_size) {
            const std::size_t end = std::min(begin + cfg.batch_size, ordering.size());
            const std::vector<std::size_t> batch(ordering.begin() + static_cast<std::ptrdiff_t>(begin),
                                                 ordering.begin() + static_cast<std::ptrdiff_t>(end));
            sgd_step(out.net, x.gather_rows(batch), y.gather_rows(batch), cfg.learning_rate);
        }
    }
    return out;
}

std::vector<std::string> predict_labels(const LabelClassifier& classifier, const Matrix& rows) {
    const Matrix p = classifier.net.forward(rows);
    std::vector<std::string> out;
    out.reserve(rows.rows());
    for (std::size_t r = 0; r < p.rows(); ++r) {
        std::size_t argmax = 0;
        for (std::size_t c = 1; c < p.cols(); ++c)
            if (p(r, c) > p(r, argmax)) argmax = c;
        out.push_back(classifier.labels[argmax]);
    }
    return out;
}

double evaluate_loss(const LabelClassifier& classifier, const EmbeddedSet& data) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < data.rows(); ++r)
        if (data.labels[r] != kUnlabeled) rows.push_back(r);
    if (rows.empty()) throw ConfigError("evaluate_loss: no labelled rows");

    const Matrix x = data.matrix.gather_rows(rows);
    Matrix y(rows.size(), classifier.labels.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        y(i, label_index(classifier.labels, data.labels[rows[i]])) = 1.0;
    return cross_entropy_loss(classifier.net.forward(x), y);
}

double macro_f1(const std::vector<std::string>& predicted, const std::vector<std::string>& truth,
                const std::vector<std::string>& labels) {
    if (predicted.size() != truth.size())
        throw ConfigError("macro_f1: prediction/truth lengths differ");
    double sum = 0.0;
    std::size_t classes = 0;
    for (const auto& label : labels) {
        std::size_t tp = 0, fp = 0, fn = 0, support = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            const bool is_true = truth[i] == label;
            const bool is_pred = predicted[i] == label;
            support += is_true ? 1 : 0;
            if (is_true && is_pred) ++tp;
            else if (!is_true && is_pred) ++fp;
            else if (is_true && !is_pred) ++fn;
        }
        if (support == 0) continue;
        const double denom = static_cast<double>(2 * tp + fp + fn);
        sum += denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
        ++classes;
    }
    return classes > 0 ? sum / static_cast<double>(classes) : 0.0;
}

} // namespace sfegacn
