#include "fakesat/boost.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "fakesat/errors.hpp"

namespace fakesat {

double sigmoid(double margin) {
    if (margin >= 0) return 1.0 / (1.0 + std::exp(-margin));
    const double e = std::exp(margin);
    return e / (1.0 + e);
}

double log_loss(std::span<const double> margins, std::span<const int> labels) {
    double total = 0.0;
    for (std::size_t i = 0; i < margins.size(); ++i) {
        const double z = labels[i] ? -margins[i] : margins[i];
        total += z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    }
    return total / static_cast<double>(margins.size());
}

double StumpEnsemble::margin(std::span<const double> x) const {
    double m = base_score;
    for (const Stump& t : trees) m += t.output(x);
    return m;
}

double predict_score(const StumpEnsemble& model, std::span<const double> x) {
    if (x.size() != model.n_features) {
        throw ShapeError("feature vector has length " + std::to_string(x.size()) + ", model expects " +
                         std::to_string(model.n_features));
    }
    return sigmoid(model.margin(x));
}

std::vector<double> predict_scores(const StumpEnsemble& model, const Matrix& X) {
    std::vector<double> out(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) out[i] = predict_score(model, X.row(i));
    return out;
}

namespace {

// Per-feature presorted view of the training matrix. `order` lists sample indices by
// ascending value (ties by index); `cut[k]` is the threshold separating positions
// k and k+1, or NaN when both hold the same value.
struct SortedColumns {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<std::uint32_t> order; // d x n
    std::vector<double> cut;          // d x (n-1)

    SortedColumns(const Matrix& X) : n(X.rows), d(X.cols), order(d * n), cut(d * (n - 1)) {
        std::vector<double> column(n);
        for (std::size_t f = 0; f < d; ++f) {
            for (std::size_t i = 0; i < n; ++i) column[i] = X(i, f);
            std::uint32_t* ord = order.data() + f * n;
            std::iota(ord, ord + n, 0u);
            std::stable_sort(ord, ord + n, [&](std::uint32_t a, std::uint32_t b) { return column[a] < column[b]; });
            double* c = cut.data() + f * (n - 1);
            for (std::size_t k = 0; k + 1 < n; ++k) {
                const double lo = column[ord[k]];
                const double hi = column[ord[k + 1]];
                if (lo < hi) {
                    double mid = lo + (hi - lo) / 2.0;
                    if (!(lo < mid)) mid = hi;
                    c[k] = mid;
                } else {
                    c[k] = std::numeric_limits<double>::quiet_NaN();
                }
            }
        }
    }
};

struct GradPair {
    double g;
    double h;
};

struct SplitChoice {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
    double gl = 0, hl = 0, gr = 0, hr = 0;
};

void validate_inputs(const Matrix& X, std::span<const int> labels, const BoostParams& params) {
    if (X.rows != labels.size()) throw ShapeError("feature rows and labels differ in length");
    if (X.rows < 2) throw ShapeError("boosting needs at least two samples");
    if (X.cols == 0) throw ShapeError("boosting needs at least one feature");
    if (X.rows > std::numeric_limits<std::uint32_t>::max()) throw ShapeError("too many samples");
    if (params.n_trees < 0 || !(params.learning_rate > 0 && params.learning_rate <= 1) || !(params.lambda >= 0)) {
        throw ConfigError("invalid boosting parameters");
    }
    bool pos = false, neg = false;
    for (int y : labels) {
        if (y != 0 && y != 1) throw ShapeError("labels must be 0 or 1");
        (y ? pos : neg) = true;
    }
    if (!pos || !neg) throw SingleClassError("boosting needs both classes");
    for (double v : X.data) {
        if (!std::isfinite(v)) throw ShapeError("non-finite feature value");
    }
}

} // namespace

StumpEnsemble fit_stumps(const Matrix& X, std::span<const int> labels, const BoostParams& params, BoostTrace* trace) {
    validate_inputs(X, labels, params);
    const std::size_t n = X.rows;
    const std::size_t d = X.cols;

    const double positives = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
    const double prior = positives / static_cast<double>(n);

    StumpEnsemble model;
    model.base_score = std::log(prior / (1.0 - prior));
    model.learning_rate = params.learning_rate;
    model.lambda = params.lambda;
    model.n_features = d;
    model.trees.reserve(static_cast<std::size_t>(params.n_trees));

    const SortedColumns cols(X);
    std::vector<double> margin(n, model.base_score);
    std::vector<GradPair> gh(n);
    const double lambda = params.lambda;
    const double mcw = params.min_child_weight;

    if (trace) {
        trace->log_loss = {log_loss(margin, labels)};
        trace->gains.clear();
    }

    for (int round = 0; round < params.n_trees; ++round) {
        double G = 0.0, H = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(margin[i]);
            gh[i] = {p - labels[i], p * (1.0 - p)};
            G += gh[i].g;
            H += gh[i].h;
        }
        const double parent = G * G / (H + lambda);

        SplitChoice best;
        for (std::size_t f = 0; f < d; ++f) {
            const std::uint32_t* ord = cols.order.data() + f * n;
            const double* cut = cols.cut.data() + f * (n - 1);
            double gl = 0.0, hl = 0.0;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                const GradPair& s = gh[ord[k]];
                gl += s.g;
                hl += s.h;
                if (std::isnan(cut[k])) continue;
                const double hr = H - hl;
                if (hl < mcw || hr < mcw) continue;
                const double gr = G - gl;
                const double gain = 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent);
                if (gain > best.gain) {
                    best = {gain, static_cast<int>(f), cut[k], gl, hl, gr, hr};
                }
            }
        }

        Stump stump;
        if (best.feature >= 0) {
            stump.feature = best.feature;
            stump.threshold = best.threshold;
            stump.left_value = -params.learning_rate * best.gl / (best.hl + lambda);
            stump.right_value = -params.learning_rate * best.gr / (best.hr + lambda);
            for (std::size_t i = 0; i < n; ++i) margin[i] += stump.output(X.row(i));
        }
        model.trees.push_back(stump);
        if (trace) {
            trace->log_loss.push_back(log_loss(margin, labels));
            trace->gains.push_back(best.gain);
        }
    }
    return model;
}

} // namespace fakesat
