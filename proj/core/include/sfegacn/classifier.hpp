#pragma once

#include "sfegacn/dataset.hpp"
#include "sfegacn/nn.hpp"

#include <string>
#include <vector>

namespace sfegacn {

/// Softmax classifier over the labelled categories of an embedded set,
/// with the label order pinned so predictions map back to names.
struct LabelClassifier {
    DenseNet net;
    std::vector<std::string> labels; // class index -> label
};

/// Trains a dense softmax classifier on every labelled row (kUnlabeled rows
/// are skipped). Batches are reshuffled per epoch from a stream derived from
/// cfg.seed, so training is deterministic.
LabelClassifier train_label_classifier(const EmbeddedSet& data,
                                       const std::vector<std::size_t>& hidden,
                                       const TrainConfig& cfg);

/// Predicted label per row (argmax; ties toward the lower class index).
std::vector<std::string> predict_labels(const LabelClassifier& classifier, const Matrix& rows);

/// Mean cross-entropy of the classifier on a labelled set. Rows whose label
/// the classifier does not know are an error.
double evaluate_loss(const LabelClassifier& classifier, const EmbeddedSet& data);

/// Macro-averaged F1 over the classifier's labels against the truth labels.
/// Classes absent from the truth are skipped; an empty intersection gives 0.
double macro_f1(const std::vector<std::string>& predicted, const std::vector<std::string>& truth,
                const std::vector<std::string>& labels);

} // namespace sfegacn
