#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fakesat/matrix.hpp"

namespace fakesat {

/// Square s x s x c patch geometry. L = s*s*c values per patch, flattened in
/// (row, col, channel) order.
struct PatchConfig {
    int size = 3;
    int channels = 3;

    int dim() const { return size * size * channels; }

    friend bool operator==(const PatchConfig&, const PatchConfig&) = default;
};

/// One-stage Saab transform: row 0 of `kernels` is the constant DC kernel
/// (1/sqrt(L) everywhere), rows 1..L-1 are AC kernels in descending eigenvalue order.
struct SaabFilterBank {
    PatchConfig config;
    std::vector<double> kernels;        // L x L, row-major, one kernel per row
    std::vector<double> energies;       // per-channel energy fraction, sums to 1
    std::vector<double> ac_eigenvalues; // L-1 second moments of the AC channels
    int ac_rank = 0;                    // AC channels with non-zero eigenvalue

    int dim() const { return config.dim(); }
    std::span<const double> kernel(int k) const {
        return {kernels.data() + static_cast<std::size_t>(k) * dim(), static_cast<std::size_t>(dim())};
    }
    /// Channels past ac_rank carry no AC energy on the training data.
    bool is_degenerate_channel(int k) const { return k > ac_rank; }
};

struct SaabFitReport {
    std::size_t samples = 0;
    int ac_rank = 0;
    bool degenerate = false;          // ac_rank < L - 1
    double residual_mean_norm = 0.0;  // |mean of AC parts|, expected to be near zero
};

struct SaabFit {
    SaabFilterBank bank;
    SaabFitReport report;
};

/// Streams patches into the sufficient statistics of a fit (sum and raw second moment),
/// so the detector never materializes the full patch matrix.
class SaabAccumulator {
public:
    explicit SaabAccumulator(PatchConfig config);

    void add(std::span<const double> patch);
    void merge(const SaabAccumulator& other);
    std::size_t count() const { return count_; }
    const PatchConfig& config() const { return config_; }

    /// Throws InsufficientData when fewer than L patches were added.
    SaabFit finish() const;

private:
    PatchConfig config_;
    std::size_t count_ = 0;
    std::vector<double> sum_;
    std::vector<double> moment_; // L x L, upper triangle accumulated
};

/// Fits a bank on an N x L patch matrix.
SaabFit fit_saab(const Matrix& patches, PatchConfig config);

/// K * patch. Throws ShapeError when the patch length is not L.
std::vector<double> transform(std::span<const double> patch, const SaabFilterBank& bank);

/// Kernel-patch dot product, shared by every response computation so that all paths
/// produce bit-identical coefficients.
inline double saab_response(std::span<const double> kernel, const double* patch) {
    double acc = 0.0;
    for (std::size_t j = 0; j < kernel.size(); ++j) acc += kernel[j] * patch[j];
    return acc;
}

std::vector<double> energy_percentages(const SaabFilterBank& bank);

/// Throws ConfigMismatch when kernels/energies do not match the config.
void validate_bank(const SaabFilterBank& bank);

} // namespace fakesat
