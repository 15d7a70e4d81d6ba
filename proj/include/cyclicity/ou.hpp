#pragma once

#include <cmath>

#include "cyclicity/circulant.hpp"
#include "cyclicity/linalg.hpp"
#include "cyclicity/types.hpp"

namespace cyclicity {

/// OU model parameters: dx = -B x dt + Sigma dw.  -B must be Hurwitz.
struct OUParams {
    Matrix friction;    // B, N x N
    Matrix volatility;  // Sigma, N x M

    int dimension() const { return static_cast<int>(friction.rows()); }
    int noise_dimension() const { return static_cast<int>(volatility.cols()); }
};

inline void require_valid(const OUParams& params, const char* who) {
    require_square(params.friction, who);
    if (params.volatility.rows() != params.friction.rows())
        throw InvalidInputError(std::string(who) + ": volatility must have N rows");
}

/// D = Sigma Sigma^T / 2.
inline Matrix diffusion_matrix(const OUParams& params) {
    return 0.5 * params.volatility * params.volatility.transpose();
}

struct StabilityReport {
    bool stable = false;
    double margin = 0.0;  // min real part of the spectrum of B
};

/// B is a valid friction matrix iff every eigenvalue has positive real part.
/// For circulant B = Circ(b_1,...,b_N) with nonpositive b_{p>1} the margin is
/// the row sum b_1 + sum_{p>=2} b_p.
inline StabilityReport check_stability(const Matrix& friction) {
    require_square(friction, "check_stability");
    const ComplexVector eigs = general_eigenvalues(friction);
    double margin = eigs[0].real();
    for (int i = 1; i < eigs.size(); ++i) margin = std::min(margin, eigs[i].real());
    return {margin > 0.0, margin};
}

namespace detail {

// Operations refuse near-unstable friction rather than emit huge covariances.
inline constexpr double kStabilityFloor = 1e-10;

inline void require_stable(const Matrix& friction, const char* who) {
    const StabilityReport rep = check_stability(friction);
    if (rep.margin < kStabilityFloor)
        throw StabilityError(std::string(who) + ": friction matrix is unstable or within " +
                             "1e-10 of instability (margin " + std::to_string(rep.margin) + ")");
}

inline void require_diffusion(const Matrix& d, const char* who) {
    require_symmetric(d, who);
    if (min_symmetric_eigenvalue(d) < -1e-12)
        throw InvalidInputError(std::string(who) + ": diffusion matrix must be PSD");
}

}  // namespace detail

struct StationaryCovariance {
    Matrix matrix;  // symmetric PSD solution of B S + S B^T = 2 D
};

/// Solve the Lyapunov equation B S + S B^T = 2 D by vectorization:
/// (I (x) B + B (x) I) vec(S) = 2 vec(D).  Dense solve, desk scale.
inline StationaryCovariance stationary_covariance(const Matrix& friction, const Matrix& diffusion) {
    detail::require_stable(friction, "stationary_covariance");
    detail::require_diffusion(diffusion, "stationary_covariance");
    const int n = static_cast<int>(friction.rows());
    if (diffusion.rows() != n)
        throw InvalidInputError("stationary_covariance: B and D dimensions differ");

    Matrix sys = Matrix::Zero(n * n, n * n);
    // I (x) B acts on columns of S, B (x) I on rows (column-major vec).
    for (int c = 0; c < n; ++c)
        sys.block(c * n, c * n, n, n) += friction;
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r)
            for (int k = 0; k < n; ++k)
                sys(r + c * n, r + k * n) += friction(c, k);

    Vector rhs(n * n);
    for (int c = 0; c < n; ++c) rhs.segment(c * n, n) = 2.0 * diffusion.col(c);
    Vector sv = sys.partialPivLu().solve(rhs);

    Matrix s(n, n);
    for (int c = 0; c < n; ++c) s.col(c) = sv.segment(c * n, n);
    s = 0.5 * (s + s.transpose());

    const double resid = (friction * s + s * friction.transpose() - 2.0 * diffusion).norm();
    if (resid > 1e-8 * std::max(1.0, diffusion.norm()))
        throw Error("stationary_covariance: Lyapunov residual " + std::to_string(resid));
    return {s};
}

/// Green's function (propagator) G(t) = exp(-t B).
inline Matrix green_function(const Matrix& friction, double t) {
    require_square(friction, "green_function");
    if (t < 0.0) throw InvalidInputError("green_function: t must be nonnegative");
    return expm(Matrix(-t * friction));
}

enum class Provenance { theoretical, closed_form, asymptotic, empirical };

/// Real skew-symmetric lead matrix with its provenance tag.
struct LeadMatrix {
    Matrix matrix;
    Provenance provenance = Provenance::theoretical;
};

inline void require_skew(const Matrix& q, const char* who, double tol = 1e-10) {
    if (skew_residual(q) > tol * std::max(1.0, q.norm()))
        throw Error(std::string(who) + ": result is not skew-symmetric");
}

/// Q = (B S - S B^T) / 2 with S the stationary covariance.
inline LeadMatrix theoretical_lead_matrix(const Matrix& friction, const Matrix& diffusion) {
    const Matrix s = stationary_covariance(friction, diffusion).matrix;
    Matrix q = 0.5 * (friction * s - s * friction.transpose());
    require_skew(q, "theoretical_lead_matrix");
    return {q, Provenance::theoretical};
}

namespace detail {

/// T_{m,n} = w_{N-m}^T D w_{N-n} for all m, n; w_{N-m} = conj(w_m).
inline ComplexMatrix diffusion_in_fourier(const ComplexMatrix& basis, const Matrix& diffusion) {
    return basis.conjugate().transpose() * diffusion.cast<Complex>() * basis.conjugate();
}

}  // namespace detail

/// Stationary covariance of a cyclic OU process assembled spectrally:
/// S = 2 sum_{m,n} w_m w_{N-m}^T D w_{N-n} w_n^T / (mu_m + mu_n).
/// Valid for any positive stability margin; used where the Lyapunov path
/// would refuse a near-unstable circulant friction matrix.
inline StationaryCovariance cyclic_stationary_covariance(const CirculantSpec& friction,
                                                         const Matrix& diffusion) {
    require_valid(friction, "cyclic_stationary_covariance");
    detail::require_diffusion(diffusion, "cyclic_stationary_covariance");
    const int n = friction.size();
    const ComplexMatrix w = fourier_basis(n);
    const ComplexMatrix t = detail::diffusion_in_fourier(w, diffusion);
    ComplexMatrix coeff(n, n);
    for (int m = 1; m <= n; ++m) {
        const Complex mu_m = circulant_eigenvalue(friction, m);
        for (int k = 1; k <= n; ++k) {
            const Complex mu_k = circulant_eigenvalue(friction, k);
            const Complex den = mu_m + mu_k;
            if (den.real() <= 0.0)
                throw StabilityError("cyclic_stationary_covariance: unstable friction matrix");
            coeff(m - 1, k - 1) = 2.0 * t(m - 1, k - 1) / den;
        }
    }
    ComplexMatrix s = w * coeff * w.transpose();
    detail::require_real(s, "cyclic_stationary_covariance");
    Matrix out = s.real();
    return {0.5 * (out + out.transpose())};
}

/// Closed-form lead matrix of the cyclic OU process:
/// Q = sum_{m,n} [(mu_m - mu_n)/(mu_m + mu_n)] w_m w_{N-m}^T D w_{N-n} w_n^T.
inline LeadMatrix cyclic_lead_matrix(const CirculantSpec& friction, const Matrix& diffusion) {
    require_valid(friction, "cyclic_lead_matrix");
    detail::require_stable(dense(friction), "cyclic_lead_matrix");
    detail::require_diffusion(diffusion, "cyclic_lead_matrix");
    const int n = friction.size();
    const ComplexMatrix w = fourier_basis(n);
    const ComplexMatrix t = detail::diffusion_in_fourier(w, diffusion);
    ComplexMatrix coeff(n, n);
    for (int m = 1; m <= n; ++m) {
        const Complex mu_m = circulant_eigenvalue(friction, m);
        for (int k = 1; k <= n; ++k) {
            const Complex mu_k = circulant_eigenvalue(friction, k);
            coeff(m - 1, k - 1) = (mu_m - mu_k) / (mu_m + mu_k) * t(m - 1, k - 1);
        }
    }
    ComplexMatrix q = w * coeff * w.transpose();
    detail::require_real(q, "cyclic_lead_matrix");
    Matrix out = 0.5 * (q.real() - q.real().transpose());
    require_skew(out, "cyclic_lead_matrix");
    return {out, Provenance::closed_form};
}

/// Autocovariance Gamma(s,t) = G(s) S G(t)^T + 2 int_0^{min(s,t)} G(s-u) D G(t-u)^T du.
inline Matrix autocovariance(const OUParams& params, double s, double t) {
    require_valid(params, "autocovariance");
    if (s < 0.0 || t < 0.0)
        throw InvalidInputError("autocovariance: times must be nonnegative");
    const Matrix d = diffusion_matrix(params);
    const Matrix cov = stationary_covariance(params.friction, d).matrix;
    Matrix gamma = green_function(params.friction, s) * cov *
                   green_function(params.friction, t).transpose();
    const double upper = std::min(s, t);
    if (upper > 0.0) {
        gamma += 2.0 * integrate_matrix(
                           [&](double u) {
                               return Matrix(green_function(params.friction, s - u) * d *
                                             green_function(params.friction, t - u).transpose());
                           },
                           upper);
    }
    return gamma;
}

/// Coefficient -Q S^{-1} multiplying x P(x,t) in the stationary probability
/// flux; the zero matrix exactly when the process is time-reversible.
inline Matrix flux_coefficient(const Matrix& friction, const Matrix& diffusion) {
    const Matrix s = stationary_covariance(friction, diffusion).matrix;
    Eigen::FullPivLU<Matrix> lu(s);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible())
        throw SingularCovarianceError("flux_coefficient: stationary covariance is singular");
    const Matrix q = theoretical_lead_matrix(friction, diffusion).matrix;
    return -q * lu.inverse();
}

}  // namespace cyclicity
