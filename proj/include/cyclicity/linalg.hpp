#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "cyclicity/types.hpp"

namespace cyclicity {

inline double frobenius(const Matrix& a) { return a.norm(); }
inline double frobenius(const ComplexMatrix& a) { return a.norm(); }

inline double skew_residual(const Matrix& a) {
    return (a + a.transpose()).norm();
}

inline bool is_square(const Matrix& a) { return a.rows() == a.cols(); }

inline void require_square(const Matrix& a, const char* who) {
    if (!is_square(a))
        throw InvalidInputError(std::string(who) + ": matrix must be square");
}

inline void require_symmetric(const Matrix& a, const char* who, double tol = 1e-10) {
    require_square(a, who);
    if ((a - a.transpose()).norm() > tol * std::max(1.0, a.norm()))
        throw InvalidInputError(std::string(who) + ": matrix must be symmetric");
}

/// Minimum eigenvalue of a symmetric matrix (used for PSD checks, tolerance -1e-12).
inline double min_symmetric_eigenvalue(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

inline bool is_psd(const Matrix& a, double tol = 1e-12) {
    return min_symmetric_eigenvalue(a) >= -tol;
}

/// Eigenvalues of a general real square matrix.
inline ComplexVector general_eigenvalues(const Matrix& a) {
    Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
    return es.eigenvalues();
}

/// Hermitian eigensystem, eigenvalues ascending, orthonormal eigenvectors.
struct HermitianEigensystem {
    Vector values;          // ascending
    ComplexMatrix vectors;  // columns
};

inline HermitianEigensystem hermitian_eigensystem(const ComplexMatrix& a) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a);
    return {es.eigenvalues(), es.eigenvectors()};
}

/// Symmetric PSD square root via eigendecomposition; negative eigenvalues are
/// clipped at 0 so singular covariances (one-sensor noise) do not fail.
inline Matrix symmetric_sqrt(const Matrix& s) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    Vector d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

/// exp(A) for a general real matrix (scaling-and-squaring Pade).
inline Matrix expm(const Matrix& a) { return a.exp(); }

namespace detail {

/// Gauss-Legendre nodes/weights on [-1,1], computed by Newton iteration on
/// the Legendre recurrence.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

}  // namespace detail

/// Composite Gauss-Legendre integration of a matrix-valued function on [0,T].
/// Panels double until two successive estimates differ by < tol in Frobenius.
template <typename F>
Matrix integrate_matrix(F&& f, double t_end, double tol = 1e-10, int nodes_per_panel = 20,
                        int max_doublings = 12) {
    std::vector<double> xs, ws;
    detail::gauss_legendre(nodes_per_panel, xs, ws);
    Matrix prev;
    int panels = 1;
    for (int round = 0; round <= max_doublings; ++round, panels *= 2) {
        Matrix acc;
        const double h = t_end / panels;
        for (int p = 0; p < panels; ++p) {
            const double a = p * h;
            for (int q = 0; q < nodes_per_panel; ++q) {
                const double t = a + 0.5 * h * (xs[q] + 1.0);
                Matrix val = f(t);
                if (acc.size() == 0)
                    acc = Matrix::Zero(val.rows(), val.cols());
                acc += (0.5 * h * ws[q]) * val;
            }
        }
        if (prev.size() != 0 && (acc - prev).norm() < tol * std::max(1.0, acc.norm()))
            return acc;
        prev = std::move(acc);
    }
    return prev;
}

}  // namespace cyclicity
