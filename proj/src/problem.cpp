#include "sparselab/problem.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "sparselab/rng.hpp"

namespace sparselab {

SensingMatrix gen_gaussian_matrix(int m, int N, std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("gen_gaussian_matrix: m must be >= 1");
    if (N < m) throw std::invalid_argument("gen_gaussian_matrix: N must be >= m");

    SensingMatrix A;
    A.seed = seed;
    A.entries.resize(m, N);
    Rng rng(seed);
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < m; ++i) A.entries(i, j) = rng.normal();
        double norm = A.entries.col(j).norm();
        // A zero column has probability zero but would poison the
        // normalization; redraw it from an incremented sub-seed.
        for (std::uint64_t attempt = 1; norm == 0.0; ++attempt) {
            Rng redraw(derive_seed(seed, 0xC01u + static_cast<std::uint64_t>(j) + attempt));
            for (int i = 0; i < m; ++i) A.entries(i, j) = redraw.normal();
            norm = A.entries.col(j).norm();
        }
        A.entries.col(j) /= norm;
    }
    return A;
}

GroundTruth gen_sparse_signal(int N, int k, std::uint64_t seed, SignalDist dist) {
    if (k < 0 || k > N) throw std::invalid_argument("gen_sparse_signal: need 0 <= k <= N");

    Rng rng(seed);
    // Partial Fisher-Yates: the first k slots of a 0..N-1 permutation.
    std::vector<int> perm(N);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(N - i)));
        std::swap(perm[i], perm[j]);
    }

    GroundTruth truth;
    truth.k = k;
    truth.support.assign(perm.begin(), perm.begin() + k);
    std::sort(truth.support.begin(), truth.support.end());

    truth.signal = Eigen::VectorXd::Zero(N);
    for (int idx : truth.support) {
        double v = 0.0;
        if (dist == SignalDist::gaussian) {
            do { v = rng.normal(); } while (v == 0.0);
        } else {
            v = (rng.next_u64() & 1u) ? 1.0 : -1.0;
        }
        truth.signal(idx) = v;
    }

    // sigma_j ledger: with magnitudes sorted descending, sigma_j is the tail
    // sum past the first j.
    std::vector<double> mags;
    mags.reserve(k);
    for (int idx : truth.support) mags.push_back(std::abs(truth.signal(idx)));
    std::sort(mags.begin(), mags.end(), std::greater<double>());
    truth.sigma.assign(k + 1, 0.0);
    for (int j = k - 1; j >= 0; --j) truth.sigma[j] = truth.sigma[j + 1] + mags[j];
    return truth;
}

Observation make_observation(const SensingMatrix& A, const GroundTruth& truth,
                             double noise_norm, std::uint64_t seed) {
    if (noise_norm < 0.0) throw std::invalid_argument("make_observation: noise_norm must be >= 0");
    if (truth.signal.size() != A.cols())
        throw std::invalid_argument("make_observation: signal length does not match cols(A)");

    const auto m = A.rows();
    Observation obs;
    obs.noise_norm = noise_norm;
    obs.noise = Eigen::VectorXd::Zero(m);
    if (noise_norm > 0.0) {
        Rng rng(seed);
        double norm = 0.0;
        for (std::uint64_t attempt = 0; norm == 0.0; ++attempt) {
            Rng redraw(attempt == 0 ? seed : derive_seed(seed, 0xE05u + attempt));
            for (Eigen::Index i = 0; i < m; ++i) obs.noise(i) = redraw.normal();
            norm = obs.noise.norm();
        }
        obs.noise *= noise_norm / norm;
    }
    obs.y = A.entries * truth.signal + obs.noise;
    obs.mu = truth.sigma.at(truth.k) + noise_norm;
    return obs;
}

namespace {

// Indices of the k largest magnitudes of x, lowest index kept on ties.
std::vector<int> top_k_indices(const Eigen::VectorXd& x, int k) {
    std::vector<int> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(x(a)) > std::abs(x(b));
    });
    order.resize(k);
    return order;
}

} // namespace

double sigma_k(const Eigen::VectorXd& x, int k) {
    if (k < 0 || k > x.size()) throw std::invalid_argument("sigma_k: need 0 <= k <= length(x)");
    if (k == static_cast<int>(x.size())) return 0.0;
    std::vector<char> kept(x.size(), 0);
    for (int idx : top_k_indices(x, k)) kept[idx] = 1;
    // The dropped magnitudes, summed in index order; equals
    // ||x - best_k(x,k)||_1 up to accumulation order.
    double tail = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (!kept[i]) tail += std::abs(x(i));
    return tail;
}

Eigen::VectorXd best_k(const Eigen::VectorXd& x, int k) {
    if (k < 0 || k > x.size()) throw std::invalid_argument("best_k: need 0 <= k <= length(x)");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
    for (int idx : top_k_indices(x, k)) out(idx) = x(idx);
    return out;
}

double lambda_inf(const SensingMatrix& A, const Eigen::VectorXd& y) {
    if (y.size() != A.rows()) throw std::invalid_argument("lambda_inf: dimension mismatch");
    return (A.entries.transpose() * y).cwiseAbs().maxCoeff();
}

} // namespace sparselab
