#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "cyclicity/linalg.hpp"
#include "cyclicity/ou.hpp"
#include "cyclicity/types.hpp"

namespace cyclicity {

// Identifiers recorded in experiment metadata; reproducibility is bitwise
// within one build of this implementation.
inline constexpr const char* kRngId = "splitmix64";
inline constexpr const char* kGaussianId = "box-muller";

/// splitmix64, seeded directly; the single source of randomness.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in (0, 1]; never 0, so log() is safe.
    double uniform() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Standard normal draws via Box-Muller, pairs cached.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = rng_.uniform();
        const double u2 = rng_.uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * kPi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    SplitMix64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

struct SimConfig {
    int iterations = 2;        // K, number of samples; K >= 2
    double step = 0.01;        // time step, > 0
    std::uint64_t seed = 0;    // determines all randomness
    enum class Init { stationary, zero, given } init = Init::stationary;
    Vector initial_state;      // used when init == given
};

inline void require_valid(const SimConfig& cfg, const char* who) {
    if (cfg.iterations < 2)
        throw InvalidInputError(std::string(who) + ": need at least K = 2 iterations");
    if (!(cfg.step > 0.0))
        throw InvalidInputError(std::string(who) + ": step must be positive");
}

/// K x N sampled realization with its time step.
struct TimeSeries {
    Matrix samples;  // row k is x_k
    double step = 0.0;

    int length() const { return static_cast<int>(samples.rows()); }
    int dimension() const { return static_cast<int>(samples.cols()); }
};

/// Draw from N(0, S) as S^{1/2} z with the symmetric PSD square root, so a
/// singular S (noise in one sensor) works.
inline Vector sample_stationary_initial(const Matrix& s, GaussianSampler& gauss) {
    require_symmetric(s, "sample_stationary_initial");
    if (min_symmetric_eigenvalue(s) < -1e-8 * std::max(1.0, s.norm()))
        throw InvalidInputError("sample_stationary_initial: covariance must be PSD");
    const Matrix root = symmetric_sqrt(s);
    Vector z(s.rows());
    for (int i = 0; i < z.size(); ++i) z[i] = gauss();
    return root * z;
}

namespace detail {

inline void require_simulatable(const OUParams& params, const SimConfig& cfg, const char* who) {
    require_valid(params, who);
    require_valid(cfg, who);
    const StabilityReport rep = check_stability(params.friction);
    if (!rep.stable)
        throw StabilityError(std::string(who) + ": friction matrix is unstable (margin " +
                             std::to_string(rep.margin) + ")");
    const ComplexVector eigs = general_eigenvalues(params.friction);
    double rho = 0.0;
    for (int i = 0; i < eigs.size(); ++i) rho = std::max(rho, std::abs(eigs[i]));
    if (cfg.step * rho >= 2.0)
        throw StepSizeError(std::string(who) + ": step * max|eigenvalue(B)| = " +
                            std::to_string(cfg.step * rho) +
                            " >= 2 violates forward-Euler stability");
}

/// Initial state; consumes N gaussians for the stationary case.
inline Vector initial_state(const OUParams& params, const SimConfig& cfg, GaussianSampler& gauss,
                            const Matrix* stationary_cov) {
    const int n = params.dimension();
    switch (cfg.init) {
        case SimConfig::Init::zero:
            return Vector::Zero(n);
        case SimConfig::Init::given:
            if (cfg.initial_state.size() != n)
                throw InvalidInputError("euler_maruyama: initial state has wrong dimension");
            return cfg.initial_state;
        case SimConfig::Init::stationary:
        default: {
            Matrix s;
            if (stationary_cov != nullptr) s = *stationary_cov;
            else s = stationary_covariance(params.friction, diffusion_matrix(params)).matrix;
            return sample_stationary_initial(s, gauss);
        }
    }
}

}  // namespace detail

/// Forward scheme x_{k+1} = x_k - dt B x_k + Sigma xi_k, xi_k ~ N(0, dt I_M).
/// The full K x N series is materialized; use simulate_time_averaged_lead for
/// long runs where only the lead matrix is wanted.
inline TimeSeries euler_maruyama(const OUParams& params, const SimConfig& cfg,
                                 const Matrix* stationary_cov = nullptr) {
    detail::require_simulatable(params, cfg, "euler_maruyama");
    const int n = params.dimension();
    const int m = params.noise_dimension();
    GaussianSampler gauss(cfg.seed);

    TimeSeries ts;
    ts.step = cfg.step;
    ts.samples.resize(cfg.iterations, n);
    Vector x = detail::initial_state(params, cfg, gauss, stationary_cov);
    ts.samples.row(0) = x;
    const double noise_scale = std::sqrt(cfg.step);
    Vector xi(m);
    for (int k = 1; k < cfg.iterations; ++k) {
        for (int j = 0; j < m; ++j) xi[j] = noise_scale * gauss();
        x = x - cfg.step * (params.friction * x) + params.volatility * xi;
        ts.samples.row(k) = x;
    }
    return ts;
}

/// Discrete lead matrix A = (1/2) sum_{k=1}^{K-1} (x_k x_{k+1}^T - x_{k+1} x_k^T),
/// exactly skew-symmetric by construction.
inline LeadMatrix empirical_lead_matrix(const TimeSeries& ts) {
    if (ts.length() < 2)
        throw InvalidInputError("empirical_lead_matrix: need at least two samples");
    const int n = ts.dimension();
    // Antisymmetric increments keep A exactly skew-symmetric and make
    // repeated vertices contribute exactly zero.
    Matrix acc = Matrix::Zero(n, n);
    for (int k = 0; k + 1 < ts.length(); ++k) {
        const auto& cur = ts.samples.row(k);
        const auto& nxt = ts.samples.row(k + 1);
        for (int r = 0; r < n; ++r)
            for (int c = r + 1; c < n; ++c) {
                const double inc = cur[r] * nxt[c] - nxt[r] * cur[c];
                acc(r, c) += inc;
                acc(c, r) -= inc;
            }
    }
    return {0.5 * acc, Provenance::empirical};
}

/// A / ((K-1) dt); converges to the theoretical Q as K grows.
inline LeadMatrix time_averaged_lead(const TimeSeries& ts) {
    LeadMatrix lead = empirical_lead_matrix(ts);
    lead.matrix /= (ts.length() - 1) * ts.step;
    return lead;
}

/// Streaming variant: simulates and accumulates the shoelace sum without
/// storing the series (K = 1e6 at N = 100 would otherwise be ~0.8 GB).
inline LeadMatrix simulate_time_averaged_lead(const OUParams& params, const SimConfig& cfg,
                                              const Matrix* stationary_cov = nullptr) {
    detail::require_simulatable(params, cfg, "simulate_time_averaged_lead");
    const int n = params.dimension();
    const int m = params.noise_dimension();
    GaussianSampler gauss(cfg.seed);
    Vector x = detail::initial_state(params, cfg, gauss, stationary_cov);
    Matrix acc = Matrix::Zero(n, n);
    const double noise_scale = std::sqrt(cfg.step);
    Vector xi(m), next(n);
    for (int k = 1; k < cfg.iterations; ++k) {
        for (int j = 0; j < m; ++j) xi[j] = noise_scale * gauss();
        next = x - cfg.step * (params.friction * x) + params.volatility * xi;
        acc.noalias() += x * next.transpose();
        x = next;
    }
    Matrix a = 0.5 * (acc - acc.transpose()) / ((cfg.iterations - 1) * cfg.step);
    return {a, Provenance::empirical};
}

/// One row of an SLLN convergence experiment.
struct SllnRow {
    std::uint64_t seed = 0;
    int iterations = 0;
    double step = 0.0;
    double relative_error = 0.0;  // Frobenius, vs the theoretical Q
};

/// For each seed, run one chain to max(K) and record the relative Frobenius
/// error of the time-averaged lead matrix against Q at every requested K.
inline std::vector<SllnRow> slln_experiment(const OUParams& params,
                                            const std::vector<int>& iteration_counts,
                                            double step, const std::vector<std::uint64_t>& seeds,
                                            const Matrix* theoretical_q = nullptr,
                                            const Matrix* stationary_cov = nullptr) {
    if (iteration_counts.empty() || seeds.empty())
        throw InvalidInputError("slln_experiment: need at least one K and one seed");
    for (int k : iteration_counts)
        if (k < 2) throw InvalidInputError("slln_experiment: every K must be >= 2");
    Matrix q;
    if (theoretical_q != nullptr) q = *theoretical_q;
    else q = theoretical_lead_matrix(params.friction, diffusion_matrix(params)).matrix;
    const double q_norm = std::max(q.norm(), 1e-300);

    std::vector<int> ks = iteration_counts;
    std::sort(ks.begin(), ks.end());
    const int k_max = ks.back();

    std::vector<SllnRow> rows;
    for (std::uint64_t seed : seeds) {
        SimConfig cfg;
        cfg.iterations = k_max;
        cfg.step = step;
        cfg.seed = seed;
        detail::require_simulatable(params, cfg, "slln_experiment");

        const int n = params.dimension();
        const int m = params.noise_dimension();
        GaussianSampler gauss(seed);
        Vector x = detail::initial_state(params, cfg, gauss, stationary_cov);
        Matrix acc = Matrix::Zero(n, n);
        const double noise_scale = std::sqrt(step);
        Vector xi(m), next(n);
        std::size_t pending = 0;
        for (int k = 1; k < k_max; ++k) {
            for (int j = 0; j < m; ++j) xi[j] = noise_scale * gauss();
            next = x - step * (params.friction * x) + params.volatility * xi;
            acc.noalias() += x * next.transpose();
            x = next;
            while (pending < ks.size() && k + 1 == ks[pending]) {
                const Matrix avg = 0.5 * (acc - acc.transpose()) / (ks[pending] - 1) / step;
                rows.push_back({seed, ks[pending], step, (avg - q).norm() / q_norm});
                ++pending;
            }
        }
    }
    return rows;
}

}  // namespace cyclicity
