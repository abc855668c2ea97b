#include "fakesat/saab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "fakesat/errors.hpp"

namespace fakesat {

namespace {

// Eigenvalues at or below this fraction of the total patch energy count as zero.
constexpr double kRankTolerance = 1e-12;

void fix_sign(std::span<double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (std::abs(v[i]) > std::abs(v[best])) best = i;
    }
    if (v[best] < 0) {
        for (double& x : v) x = -x;
    }
}

} // namespace

SaabAccumulator::SaabAccumulator(PatchConfig config)
    : config_(config),
      sum_(static_cast<std::size_t>(config.dim()), 0.0),
      moment_(static_cast<std::size_t>(config.dim()) * config.dim(), 0.0) {
    if (config.size < 1 || config.channels < 1) throw ConfigError("invalid patch config");
}

void SaabAccumulator::add(std::span<const double> patch) {
    const std::size_t L = sum_.size();
    if (patch.size() != L) throw ShapeError("patch length does not match the patch config");
    for (std::size_t i = 0; i < L; ++i) {
        const double xi = patch[i];
        sum_[i] += xi;
        double* row = moment_.data() + i * L;
        for (std::size_t j = i; j < L; ++j) row[j] += xi * patch[j];
    }
    ++count_;
}

void SaabAccumulator::merge(const SaabAccumulator& other) {
    if (!(other.config_ == config_)) throw ConfigMismatch("cannot merge accumulators of different configs");
    for (std::size_t i = 0; i < sum_.size(); ++i) sum_[i] += other.sum_[i];
    for (std::size_t i = 0; i < moment_.size(); ++i) moment_[i] += other.moment_[i];
    count_ += other.count_;
}

SaabFit SaabAccumulator::finish() const {
    const int L = config_.dim();
    if (count_ < static_cast<std::size_t>(L)) {
        throw InsufficientData("Saab fit needs at least " + std::to_string(L) + " patches, got " +
                               std::to_string(count_));
    }
    const double n = static_cast<double>(count_);

    Eigen::MatrixXd moment(L, L);
    for (int i = 0; i < L; ++i)
        for (int j = i; j < L; ++j) moment(i, j) = moment(j, i) = moment_[static_cast<std::size_t>(i) * L + j] / n;

    // AC part of a patch is P x with P = I - 11^T / L, so the AC second moment is P M P.
    const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(L, L) - Eigen::MatrixXd::Constant(L, L, 1.0 / L);
    const Eigen::MatrixXd ac_moment = P * moment * P;

    // Orthonormal basis of the DC complement: columns 1..L-1 of the Householder
    // reflection that maps e0 onto the DC direction.
    const double inv_sqrt_l = 1.0 / std::sqrt(static_cast<double>(L));
    Eigen::VectorXd w = Eigen::VectorXd::Constant(L, -inv_sqrt_l);
    w(0) += 1.0;
    const Eigen::MatrixXd H = Eigen::MatrixXd::Identity(L, L) - 2.0 * w * w.transpose() / w.squaredNorm();
    const Eigen::MatrixXd Q = H.rightCols(L - 1);

    Eigen::MatrixXd reduced = Q.transpose() * ac_moment * Q;
    reduced = 0.5 * (reduced + reduced.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(reduced);
    if (solver.info() != Eigen::Success) throw DegenerateInput("eigendecomposition failed");
    const Eigen::VectorXd& values = solver.eigenvalues();

    std::vector<int> order(static_cast<std::size_t>(L - 1));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values(a) > values(b); });

    SaabFit fit;
    SaabFilterBank& bank = fit.bank;
    bank.config = config_;
    bank.kernels.assign(static_cast<std::size_t>(L) * L, 0.0);
    bank.ac_eigenvalues.resize(static_cast<std::size_t>(L - 1));
    std::fill_n(bank.kernels.begin(), L, inv_sqrt_l);

    const double total_energy = moment.trace();
    const double zero_level = kRankTolerance * std::max(total_energy, std::numeric_limits<double>::min());
    int rank = 0;
    for (int k = 0; k < L - 1; ++k) {
        const int src = order[static_cast<std::size_t>(k)];
        const Eigen::VectorXd kernel = Q * solver.eigenvectors().col(src);
        std::span<double> row(bank.kernels.data() + static_cast<std::size_t>(k + 1) * L, static_cast<std::size_t>(L));
        for (int j = 0; j < L; ++j) row[static_cast<std::size_t>(j)] = kernel(j);
        fix_sign(row);
        const double lambda = std::max(values(src), 0.0);
        bank.ac_eigenvalues[static_cast<std::size_t>(k)] = lambda;
        if (lambda > zero_level) ++rank;
    }
    bank.ac_rank = rank;

    // Mean squared coefficient per channel: diag(K M K^T).
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> K(
        bank.kernels.data(), L, L);
    const Eigen::VectorXd channel_energy = (K * moment * K.transpose()).diagonal();
    const double energy_sum = channel_energy.sum();
    bank.energies.assign(static_cast<std::size_t>(L), 0.0);
    if (energy_sum > 0) {
        for (int k = 0; k < L; ++k) bank.energies[static_cast<std::size_t>(k)] = std::max(channel_energy(k), 0.0) / energy_sum;
        const double s = std::accumulate(bank.energies.begin(), bank.energies.end(), 0.0);
        for (double& e : bank.energies) e /= s;
    } else {
        bank.energies[0] = 1.0;
    }

    Eigen::VectorXd mean(L);
    for (int i = 0; i < L; ++i) mean(i) = sum_[static_cast<std::size_t>(i)] / n;
    fit.report.samples = count_;
    fit.report.ac_rank = rank;
    fit.report.degenerate = rank < L - 1;
    fit.report.residual_mean_norm = (P * mean).norm();
    return fit;
}

SaabFit fit_saab(const Matrix& patches, PatchConfig config) {
    if (patches.cols != static_cast<std::size_t>(config.dim())) {
        throw ShapeError("patch matrix has " + std::to_string(patches.cols) + " columns, expected " +
                         std::to_string(config.dim()));
    }
    SaabAccumulator acc(config);
    for (std::size_t i = 0; i < patches.rows; ++i) {
        const auto row = patches.row(i);
        if (!std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); })) {
            throw ShapeError("non-finite patch value");
        }
        acc.add(row);
    }
    return acc.finish();
}

void validate_bank(const SaabFilterBank& bank) {
    const auto L = static_cast<std::size_t>(bank.dim());
    if (bank.kernels.size() != L * L || bank.energies.size() != L ||
        (!bank.ac_eigenvalues.empty() && bank.ac_eigenvalues.size() != L - 1)) {
        throw ConfigMismatch("filter bank does not match its patch config");
    }
}

std::vector<double> transform(std::span<const double> patch, const SaabFilterBank& bank) {
    const int L = bank.dim();
    if (patch.size() != static_cast<std::size_t>(L)) throw ShapeError("patch length does not match the bank");
    validate_bank(bank);
    std::vector<double> coeffs(static_cast<std::size_t>(L));
    for (int k = 0; k < L; ++k) coeffs[static_cast<std::size_t>(k)] = saab_response(bank.kernel(k), patch.data());
    return coeffs;
}

std::vector<double> energy_percentages(const SaabFilterBank& bank) { return bank.energies; }

} // namespace fakesat
