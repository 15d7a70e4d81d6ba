#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "cyclicity/linalg.hpp"
#include "cyclicity/types.hpp"

namespace cyclicity {

/// Rotate a unit vector so its largest-modulus component is real positive.
/// Ties are broken by the lowest index.  Applying the rotation twice is a
/// no-op, which tests rely on.
inline ComplexVector apply_phase_convention(ComplexVector v) {
    const int n = static_cast<int>(v.size());
    if (n == 0) return v;
    double best = 0.0;
    for (int i = 0; i < n; ++i) best = std::max(best, std::abs(v[i]));
    if (best == 0.0) return v;
    int pick = 0;
    for (int i = 0; i < n; ++i) {
        if (std::abs(v[i]) >= best * (1.0 - 1e-12)) {
            pick = i;
            break;
        }
    }
    const Complex z = v[pick];
    if (std::abs(z) > 0.0) v *= std::conj(z) / std::abs(z);
    return v;
}

/// Principal arguments of the components, each reported in (-pi, pi].
inline Vector phases_of(const ComplexVector& v) {
    Vector p(v.size());
    for (int i = 0; i < v.size(); ++i) {
        double a = std::arg(v[i]);
        if (a <= -kPi) a = kPi;
        p[i] = a;
    }
    return p;
}

inline Vector moduli_of(const ComplexVector& v) {
    Vector m(v.size());
    for (int i = 0; i < v.size(); ++i) m[i] = std::abs(v[i]);
    return m;
}

/// Arguments mapped into [0, 2 pi), the range used for cyclic-order argsorts.
inline Vector phases_in_two_pi(const ComplexVector& v) {
    Vector p(v.size());
    for (int i = 0; i < v.size(); ++i) {
        double a = std::arg(v[i]);
        if (a < 0.0) a += 2.0 * kPi;
        p[i] = a;
    }
    return p;
}

/// Ascending argsort, 1-based output; ties keep the lower index first.
inline std::vector<int> argsort_ascending(const Vector& values) {
    std::vector<int> idx(values.size());
    std::iota(idx.begin(), idx.end(), 1);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return values[a - 1] < values[b - 1]; });
    return idx;
}

/// Spectrum of a real skew-symmetric matrix: eigenvalues 0 or purely
/// imaginary in conjugate pairs, sorted by modulus descending, and the
/// leading eigenvector under the fixed phase convention.
struct SkewSpectrum {
    ComplexVector eigenvalues;    // modulus-descending; +imag member of each pair first
    ComplexMatrix eigenvectors;   // columns, matching eigenvalue order
    ComplexVector leading_eigenvector;
    Vector phases;                // of the leading eigenvector, in (-pi, pi]
    Vector moduli;                // of the leading eigenvector
};

/// Eigen-analysis via the Hermitian matrix iA.  lambda_1 is the member of
/// the top conjugate pair with positive imaginary part.
inline SkewSpectrum skew_eigendecomposition(const Matrix& a) {
    require_square(a, "skew_eigendecomposition");
    const int n = static_cast<int>(a.rows());
    if (skew_residual(a) > 1e-8 * std::max(1.0, a.norm()))
        throw InvalidInputError("skew_eigendecomposition: matrix is not skew-symmetric");

    SkewSpectrum sp;
    if (a.norm() == 0.0) {
        sp.eigenvalues = ComplexVector::Zero(n);
        sp.eigenvectors = ComplexMatrix::Identity(n, n);
        sp.leading_eigenvector = ComplexVector::Zero(n);
        sp.leading_eigenvector[0] = 1.0;
        sp.phases = phases_of(sp.leading_eigenvector);
        sp.moduli = moduli_of(sp.leading_eigenvector);
        return sp;
    }

    ComplexMatrix h = Complex(0.0, 1.0) * a.cast<Complex>();
    HermitianEigensystem es = hermitian_eigensystem(h);

    // iA has real eigenvalues h_k; the skew eigenvalue is -i h_k.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        return std::abs(es.values[i]) > std::abs(es.values[j]);
    });
    // A conjugate pair's moduli may differ by rounding; group near-equal
    // moduli and put h < 0 (positive imaginary part of -i h) first.
    const double tie_tol = 1e-12 * std::max(1.0, std::abs(es.values[order[0]]));
    for (int lo = 0; lo < n;) {
        int hi = lo + 1;
        while (hi < n &&
               std::abs(es.values[order[lo]]) - std::abs(es.values[order[hi]]) <= tie_tol)
            ++hi;
        std::sort(order.begin() + lo, order.begin() + hi,
                  [&](int i, int j) { return es.values[i] < es.values[j]; });
        lo = hi;
    }

    sp.eigenvalues.resize(n);
    sp.eigenvectors.resize(n, n);
    for (int k = 0; k < n; ++k) {
        sp.eigenvalues[k] = Complex(0.0, -es.values[order[k]]);
        sp.eigenvectors.col(k) = es.vectors.col(order[k]);
    }
    sp.leading_eigenvector = apply_phase_convention(sp.eigenvectors.col(0));
    sp.eigenvectors.col(0) = sp.leading_eigenvector;
    sp.phases = phases_of(sp.leading_eigenvector);
    sp.moduli = moduli_of(sp.leading_eigenvector);
    return sp;
}

/// |lambda_1 / lambda_3|, with +inf as the exact-rank-2 sentinel.
inline double eigenvalue_ratio(const Matrix& a) {
    if (a.rows() < 3)
        throw InvalidInputError("eigenvalue_ratio: requires N >= 3");
    SkewSpectrum sp = skew_eigendecomposition(a);
    const double l1 = std::abs(sp.eigenvalues[0]);
    const double l3 = std::abs(sp.eigenvalues[2]);
    if (l3 <= 1e-14 * l1) return std::numeric_limits<double>::infinity();
    return l1 / l3;
}

/// Gershgorin radii R_j = sum_k |A_{j,k}|.
inline Vector gershgorin_radii(const ComplexMatrix& a) {
    if (a.rows() != a.cols())
        throw InvalidInputError("gershgorin_radii: matrix must be square");
    Vector r(a.rows());
    for (int j = 0; j < a.rows(); ++j) r[j] = a.row(j).cwiseAbs().sum();
    return r;
}

inline Vector gershgorin_radii(const Matrix& a) {
    return gershgorin_radii(ComplexMatrix(a.cast<Complex>()));
}

/// Delete row j and column j (1-based); Hermitian/skew structure carries over.
template <typename MatrixType>
MatrixType principal_minor(const MatrixType& a, int j) {
    if (a.rows() != a.cols())
        throw InvalidInputError("principal_minor: matrix must be square");
    const int n = static_cast<int>(a.rows());
    if (j < 1 || j > n)
        throw InvalidInputError("principal_minor: index out of range 1..N");
    MatrixType m(n - 1, n - 1);
    for (int r = 0, rr = 0; r < n; ++r) {
        if (r == j - 1) continue;
        for (int c = 0, cc = 0; c < n; ++c) {
            if (c == j - 1) continue;
            m(rr, cc) = a(r, c);
            ++cc;
        }
        ++rr;
    }
    return m;
}

/// Largest eigenvalue and its (phase-normalized) eigenvector of a Hermitian
/// matrix.  This is the natural gauge for the Hermitian matrices A_N.
struct HermitianTopPair {
    double value = 0.0;
    ComplexVector vector;
};

inline HermitianTopPair hermitian_top_eigenpair(const ComplexMatrix& a) {
    HermitianEigensystem es = hermitian_eigensystem(a);
    const int last = static_cast<int>(es.values.size()) - 1;
    return {es.values[last], apply_phase_convention(es.vectors.col(last))};
}

/// Eigenvalue-eigenvector identity check for a Hermitian matrix with simple
/// largest eigenvalue: compares |v_{1,j}|^2 against the minor-spectrum
/// product formula and returns the maximum absolute deviation.
inline double eigen_eigvec_identity_check(const ComplexMatrix& a) {
    if (a.rows() != a.cols())
        throw InvalidInputError("eigen_eigvec_identity_check: matrix must be square");
    if ((a - a.adjoint()).norm() > 1e-10 * std::max(1.0, a.norm()))
        throw InvalidInputError("eigen_eigvec_identity_check: matrix must be Hermitian");
    const int n = static_cast<int>(a.rows());
    HermitianEigensystem es = hermitian_eigensystem(a);
    const double lam1 = es.values[n - 1];
    if (n > 1 && (lam1 - es.values[n - 2]) < 1e-12 * std::max(1.0, std::abs(lam1)))
        throw DegenerateRankError("eigen_eigvec_identity_check: lambda_1 is degenerate");
    const ComplexVector v1 = es.vectors.col(n - 1);

    double max_dev = 0.0;
    double denom = 1.0;
    for (int k = 0; k < n - 1; ++k) denom *= lam1 - es.values[k];
    for (int j = 1; j <= n; ++j) {
        HermitianEigensystem minor_es = hermitian_eigensystem(principal_minor(a, j));
        double numer = 1.0;
        for (int k = 0; k < n - 1; ++k) numer *= lam1 - minor_es.values[k];
        const double lhs = std::norm(v1[j - 1]);
        max_dev = std::max(max_dev, std::abs(lhs - numer / denom));
    }
    return max_dev;
}

/// Top eigenpair of the rank-2 skew matrix a b^T - b a^T.  lambda_1 is
/// i sin(theta) |a| |b| (positive imaginary part, theta the angle between a
/// and b) and v1 the matching eigenvector, phase-normalized.
struct Rank2Eigensystem {
    Complex eigenvalue;
    ComplexVector eigenvector;
};

inline Rank2Eigensystem rank2_eigensystem(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw InvalidInputError("rank2_eigensystem: vectors must have equal length");
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0)
        throw DegenerateRankError("rank2_eigensystem: zero vector");
    const Vector a_hat = a / na, b_hat = b / nb;
    const double c = a_hat.dot(b_hat);
    // sin(theta) via the orthogonal component; stable where acos is not
    const double s = (b_hat - c * a_hat).norm();
    if (s < 1e-12)
        throw DegenerateRankError("rank2_eigensystem: a and b are collinear");
    const double theta = std::atan2(s, c);

    const Complex lam(0.0, std::sin(theta) * na * nb);
    const Complex rot = -std::exp(Complex(0.0, theta));
    ComplexVector v = rot * (a / na).cast<Complex>() + (b / nb).cast<Complex>();
    v /= v.norm();
    return {lam, apply_phase_convention(v)};
}

/// Worst violation of Cauchy interlacing between a Hermitian matrix and its
/// j-th principal minor: max over k of the amounts by which
/// lambda_k(A) >= lambda_k(minor) >= lambda_{k+1}(A) fails.  Nonpositive
/// values mean interlacing holds.
inline double interlacing_violation(const ComplexMatrix& a, int j) {
    HermitianEigensystem full = hermitian_eigensystem(a);
    HermitianEigensystem minor = hermitian_eigensystem(ComplexMatrix(principal_minor(a, j)));
    const int n = static_cast<int>(a.rows());
    double worst = -std::numeric_limits<double>::infinity();
    // eigenvalues ascending; lambda_k in the descending sense is values[n-k]
    for (int k = 1; k <= n - 1; ++k) {
        const double lam_k = full.values[n - k];
        const double lam_k1 = full.values[n - k - 1];
        const double minor_k = minor.values[n - 1 - k];
        worst = std::max(worst, minor_k - lam_k);
        worst = std::max(worst, lam_k1 - minor_k);
    }
    return worst;
}

/// Residual of v against a target after the optimal global phase rotation.
inline double phase_aligned_residual(const ComplexVector& v, const ComplexVector& target) {
    const Complex ip = v.dot(target);  // conjugates v
    if (std::abs(ip) < 1e-300) return std::sqrt(2.0);
    return (v * (ip / std::abs(ip)) - target).norm();
}

/// Best match of v against a target over global phase and conjugation.
/// Leading eigenvectors of real skew matrices are defined only up to these
/// two gauges; comparisons against closed-form target vectors go through here and
/// report which orientation matched.
struct GaugeMatch {
    double residual = 0.0;
    bool conjugated = false;
};

inline GaugeMatch match_up_to_phase_and_conjugation(const ComplexVector& v,
                                                    const ComplexVector& target) {
    const double direct = phase_aligned_residual(v, target);
    const double flipped = phase_aligned_residual(v.conjugate(), target);
    if (flipped < direct) return {flipped, true};
    return {direct, false};
}

/// |<v, target>| maximized over conjugation orientation.
inline GaugeMatch overlap_up_to_conjugation(const ComplexVector& v, const ComplexVector& target) {
    const double direct = std::abs(v.dot(target));
    const double flipped = std::abs(v.conjugate().dot(target));
    if (flipped > direct) return {flipped, true};
    return {direct, false};
}

}  // namespace cyclicity
