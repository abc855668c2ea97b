#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fakesat/matrix.hpp"

namespace fakesat {

/// Depth-1 regression tree: one split (feature, threshold) and two leaf outputs.
/// Samples with x[feature] < threshold go left.
struct Stump {
    int feature = 0;
    double threshold = 0.0;
    double left_value = 0.0;
    double right_value = 0.0;

    double output(std::span<const double> x) const {
        return x[static_cast<std::size_t>(feature)] < threshold ? left_value : right_value;
    }

    friend bool operator==(const Stump&, const Stump&) = default;
};

struct BoostParams {
    int n_trees = 100;
    double learning_rate = 0.3;
    double lambda = 1.0;
    double min_child_weight = 1.0;

    friend bool operator==(const BoostParams&, const BoostParams&) = default;
};

/// Logistic-link additive model over stumps. The parameter count covers the trees only.
struct StumpEnsemble {
    std::vector<Stump> trees;
    double base_score = 0.0; // initial log-odds
    double learning_rate = 0.3;
    double lambda = 1.0;
    std::size_t n_features = 0;

    double margin(std::span<const double> x) const;

    friend bool operator==(const StumpEnsemble&, const StumpEnsemble&) = default;
};

/// Optional diagnostics of a fit.
struct BoostTrace {
    std::vector<double> log_loss; // entry 0 before the first round, then one per round
    std::vector<double> gains;    // best split gain per round, 0 for padded rounds
};

/// Second-order boosting with logistic loss and exact greedy split search.
/// `labels` are 0/1 with 1 the positive (fake) class.
StumpEnsemble fit_stumps(const Matrix& X, std::span<const int> labels, const BoostParams& params,
                         BoostTrace* trace = nullptr);

/// sigmoid(base_score + sum of leaf outputs). Throws ShapeError on a dimension mismatch.
double predict_score(const StumpEnsemble& model, std::span<const double> x);

std::vector<double> predict_scores(const StumpEnsemble& model, const Matrix& X);

/// Four parameters per tree: the split (dimension and value) plus two leaf values.
inline std::size_t param_count(const StumpEnsemble& model) { return 4 * model.trees.size(); }

double sigmoid(double margin);

/// Mean logistic loss of margins against 0/1 labels.
double log_loss(std::span<const double> margins, std::span<const int> labels);

} // namespace fakesat
