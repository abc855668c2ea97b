#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "fakesat/boost.hpp"
#include "fakesat/errors.hpp"
#include "fakesat/random.hpp"

using namespace fakesat;

namespace {

struct Data {
    Matrix X;
    std::vector<int> y;
};

// Two noisy Gaussian classes over d features; only the first two are informative.
Data blobs(std::size_t n, std::size_t d, std::uint64_t seed, double separation = 1.0) {
    Rng rng(seed);
    Data data{Matrix(n, d), std::vector<int>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const int label = static_cast<int>(i % 2);
        data.y[i] = label;
        for (std::size_t f = 0; f < d; ++f) {
            const double shift = f < 2 ? (label ? separation : -separation) : 0.0;
            data.X(i, f) = shift + rng.normal();
        }
    }
    return data;
}

double accuracy(const StumpEnsemble& m, const Data& data) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < data.X.rows; ++i)
        hits += (predict_score(m, data.X.row(i)) >= 0.5) == (data.y[i] == 1);
    return static_cast<double>(hits) / static_cast<double>(data.X.rows);
}

// Brute-force first round: every midpoint of every feature, scored from scratch.
Stump naive_first_stump(const Data& data, const BoostParams& params) {
    const std::size_t n = data.X.rows;
    double pos = 0;
    for (int v : data.y) pos += v;
    const double p = pos / static_cast<double>(n);
    const double h = p * (1 - p);
    double best_gain = 0.0;
    Stump best;
    for (std::size_t f = 0; f < data.X.cols; ++f) {
        std::set<double> values;
        for (std::size_t i = 0; i < n; ++i) values.insert(data.X(i, f));
        for (auto it = values.begin(); std::next(it) != values.end(); ++it) {
            const double t = 0.5 * (*it + *std::next(it));
            double gl = 0, hl = 0, gr = 0, hr = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double g = p - data.y[i];
                if (data.X(i, f) < t) {
                    gl += g;
                    hl += h;
                } else {
                    gr += g;
                    hr += h;
                }
            }
            if (hl < params.min_child_weight || hr < params.min_child_weight) continue;
            const double l = params.lambda;
            const double gain = 0.5 * (gl * gl / (hl + l) + gr * gr / (hr + l) - (gl + gr) * (gl + gr) / (hl + hr + l));
            if (gain > best_gain + 1e-12) {
                best_gain = gain;
                best = {static_cast<int>(f), t, -params.learning_rate * gl / (hl + l), -params.learning_rate * gr / (hr + l)};
            }
        }
    }
    return best;
}

} // namespace

TEST_CASE("first stump matches a brute-force split search") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Data data = blobs(60, 4, seed, 0.8);
        BoostParams params;
        params.n_trees = 1;
        const auto model = fit_stumps(data.X, data.y, params);
        const Stump ref = naive_first_stump(data, params);
        REQUIRE(model.trees.size() == 1);
        CHECK(model.trees[0].feature == ref.feature);
        CHECK(model.trees[0].threshold == doctest::Approx(ref.threshold).epsilon(1e-12));
        CHECK(model.trees[0].left_value == doctest::Approx(ref.left_value).epsilon(1e-9));
        CHECK(model.trees[0].right_value == doctest::Approx(ref.right_value).epsilon(1e-9));
    }
}

TEST_CASE("separable data is fit perfectly") {
    const Data data = blobs(200, 3, 7, 5.0);
    const auto model = fit_stumps(data.X, data.y, {});
    CHECK(accuracy(model, data) == 1.0);
}

TEST_CASE("noisy blobs generalize") {
    const Data train = blobs(400, 5, 8, 1.0);
    const Data test = blobs(400, 5, 9, 1.0);
    const auto model = fit_stumps(train.X, train.y, {});
    CHECK(accuracy(model, test) > 0.85);
}

TEST_CASE("base score is the log-odds of the positive prior") {
    Data data = blobs(100, 2, 10);
    for (std::size_t i = 0; i < 25; ++i) data.y[2 * i + 1] = 0; // 25 positives remain
    BoostParams params;
    params.n_trees = 0;
    const auto model = fit_stumps(data.X, data.y, params);
    CHECK(model.base_score == doctest::Approx(std::log(25.0 / 75.0)));
    CHECK(predict_score(model, data.X.row(0)) == doctest::Approx(0.25));
}

TEST_CASE("empty ensemble on balanced data scores one half") {
    StumpEnsemble model;
    model.n_features = 3;
    const double x[3] = {1, 2, 3};
    CHECK(predict_score(model, x) == 0.5);
}

TEST_CASE("flipping labels mirrors the scores") {
    for (std::uint64_t seed = 11; seed < 15; ++seed) {
        Data data = blobs(150, 4, seed, 0.7);
        const auto a = fit_stumps(data.X, data.y, {});
        for (int& v : data.y) v = 1 - v;
        const auto b = fit_stumps(data.X, data.y, {});
        for (std::size_t i = 0; i < data.X.rows; ++i)
            CHECK(std::abs(predict_score(a, data.X.row(i)) + predict_score(b, data.X.row(i)) - 1.0) < 1e-9);
    }
}

TEST_CASE("strictly increasing feature transforms leave training predictions unchanged") {
    const Data data = blobs(150, 3, 16, 0.7);
    Data warped = data;
    for (double& v : warped.X.data) v = std::exp(v) * 3.0 + 1.0;
    const auto a = fit_stumps(data.X, data.y, {});
    const auto b = fit_stumps(warped.X, warped.y, {});
    for (std::size_t i = 0; i < data.X.rows; ++i)
        CHECK(predict_score(a, data.X.row(i)) == doctest::Approx(predict_score(b, warped.X.row(i))).epsilon(1e-12));
    for (std::size_t t = 0; t < a.trees.size(); ++t) CHECK(a.trees[t].feature == b.trees[t].feature);
}

TEST_CASE("parameter counts") {
    const Data data = blobs(80, 2, 17);
    BoostParams params;
    CHECK(param_count(fit_stumps(data.X, data.y, params)) == 400);
    params.n_trees = 300;
    CHECK(param_count(fit_stumps(data.X, data.y, params)) == 1200);
    params.n_trees = 0;
    CHECK(param_count(fit_stumps(data.X, data.y, params)) == 0);
}

TEST_CASE("training loss never increases") {
    for (std::uint64_t seed = 20; seed < 25; ++seed) {
        const Data data = blobs(120, 4, seed, 0.5);
        BoostTrace trace;
        fit_stumps(data.X, data.y, {}, &trace);
        REQUIRE(trace.log_loss.size() == 101);
        for (std::size_t k = 1; k < trace.log_loss.size(); ++k) CHECK(trace.log_loss[k] <= trace.log_loss[k - 1] + 1e-12);
        CHECK(trace.log_loss.back() < trace.log_loss.front());
    }
}

TEST_CASE("fitting is deterministic") {
    const Data data = blobs(120, 4, 30);
    CHECK(fit_stumps(data.X, data.y, {}) == fit_stumps(data.X, data.y, {}));
}

TEST_CASE("thresholds separate distinct values and ties go to the lowest feature") {
    Data data{Matrix(8, 2), {0, 0, 0, 0, 1, 1, 1, 1}};
    for (std::size_t i = 0; i < 8; ++i) data.X(i, 0) = data.X(i, 1) = static_cast<double>(i);
    BoostParams params;
    params.n_trees = 1;
    params.min_child_weight = 0.0;
    const auto model = fit_stumps(data.X, data.y, params);
    CHECK(model.trees[0].feature == 0);
    CHECK(model.trees[0].threshold == 3.5);
    CHECK(model.trees[0].left_value < 0);
    CHECK(model.trees[0].right_value > 0);
}

TEST_CASE("threshold between adjacent doubles stays above the lower value") {
    const double lo = 1.0;
    const double hi = std::nextafter(1.0, 2.0);
    Data data{Matrix(4, 1), {0, 0, 1, 1}};
    data.X.data = {lo, lo, hi, hi};
    BoostParams params;
    params.n_trees = 1;
    params.min_child_weight = 0.0;
    const auto model = fit_stumps(data.X, data.y, params);
    CHECK(model.trees[0].threshold > lo);
    const double below[1] = {lo};
    const double above[1] = {hi};
    CHECK(predict_score(model, below) < 0.5);
    CHECK(predict_score(model, above) > 0.5);
}

TEST_CASE("rounds without a valid split add zero stumps") {
    Data data{Matrix(10, 2, 1.0), {0, 1, 0, 1, 0, 1, 0, 1, 0, 1}};
    BoostTrace trace;
    const auto model = fit_stumps(data.X, data.y, {}, &trace);
    CHECK(model.trees.size() == 100);
    for (const Stump& s : model.trees) CHECK(s == Stump{});
    for (double g : trace.gains) CHECK(g == 0.0);
}

TEST_CASE("input errors") {
    const Data data = blobs(20, 2, 40);
    CHECK_THROWS_AS(fit_stumps(data.X, std::vector<int>(20, 1), {}), SingleClassError);
    CHECK_THROWS_AS(fit_stumps(data.X, std::vector<int>(19, 0), {}), ShapeError);
    std::vector<int> bad = data.y;
    bad[0] = 2;
    CHECK_THROWS_AS(fit_stumps(data.X, bad, {}), ShapeError);
    BoostParams params;
    params.learning_rate = 0.0;
    CHECK_THROWS_AS(fit_stumps(data.X, data.y, params), ConfigError);
    const auto model = fit_stumps(data.X, data.y, {});
    const double x[3] = {0, 0, 0};
    CHECK_THROWS_AS(predict_score(model, x), ShapeError);
}

TEST_CASE("sigmoid and log loss") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(sigmoid(800.0) == 1.0);
    CHECK(sigmoid(-800.0) == 0.0);
    const double margins[2] = {0.0, 0.0};
    const int labels[2] = {0, 1};
    CHECK(log_loss(margins, labels) == doctest::Approx(std::log(2.0)));
    const double big[1] = {1000.0};
    const int one[1] = {0};
    CHECK(std::isfinite(log_loss(big, one)));
}
