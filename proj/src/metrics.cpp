#include "fakesat/metrics.hpp"

#include "fakesat/errors.hpp"

namespace fakesat {

double f1_score(double precision, double recall) {
    const double denom = precision + recall;
    return denom > 0 ? 2.0 * precision * recall / denom : 0.0;
}

Metrics Metrics::from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
    Metrics m{tp, fp, fn, tn};
    m.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = f1_score(m.precision, m.recall);
    return m;
}

Metrics compute_metrics(std::span<const Label> truth, std::span<const Label> predicted) {
    if (truth.size() != predicted.size()) throw ShapeError("truth and prediction counts differ");
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == Label::Unknown) continue;
        const bool actual = truth[i] == Label::Fake;
        const bool guess = predicted[i] == Label::Fake;
        if (actual && guess) ++tp;
        else if (!actual && guess) ++fp;
        else if (actual) ++fn;
        else ++tn;
    }
    return Metrics::from_counts(tp, fp, fn, tn);
}

} // namespace fakesat
