#pragma once

#include <cstddef>
#include <span>

#include "fakesat/image.hpp"

namespace fakesat {

/// Confusion counts with Fake as the positive class, plus the derived rates.
struct Metrics {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    static Metrics from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn);

    std::size_t total() const { return tp + fp + fn + tn; }
    friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// Harmonic mean; 0 when precision + recall = 0.
double f1_score(double precision, double recall);

/// Unknown truth labels are skipped.
Metrics compute_metrics(std::span<const Label> truth, std::span<const Label> predicted);

} // namespace fakesat
