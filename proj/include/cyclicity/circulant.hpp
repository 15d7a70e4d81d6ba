#pragma once

#include <cmath>
#include <vector>

#include "cyclicity/linalg.hpp"
#include "cyclicity/types.hpp"

namespace cyclicity {

/// An N x N circulant matrix described by its first row (c_1, ..., c_N).
/// Dense entry (m, n) is c_{n-m+1} with the index reduced into 1..N mod N.
struct CirculantSpec {
    Vector first_row;

    int size() const { return static_cast<int>(first_row.size()); }
};

inline void require_valid(const CirculantSpec& spec, const char* who) {
    if (spec.size() < 1)
        throw InvalidInputError(std::string(who) + ": first_row must be nonempty (N >= 1)");
}

inline Matrix dense(const CirculantSpec& spec) {
    require_valid(spec, "dense");
    const int n = spec.size();
    Matrix a(n, n);
    for (int m = 1; m <= n; ++m)
        for (int k = 1; k <= n; ++k)
            a(m - 1, k - 1) = spec.first_row[mod_index(k - m + 1, n) - 1];
    return a;
}

/// The n-th root of unity omega_n = exp(2 pi i n / N), 1-based n.
inline Complex root_of_unity(int n, int big_n) {
    const double arg = 2.0 * kPi * static_cast<double>(n) / static_cast<double>(big_n);
    return {std::cos(arg), std::sin(arg)};
}

/// Normalized Fourier vector w_n with component k equal to omega_n^{k-1}/sqrt(N).
inline ComplexVector fourier_vector(int n, int big_n) {
    ComplexVector w(big_n);
    for (int k = 1; k <= big_n; ++k) {
        // omega_n^{k-1} = exp(2 pi i n (k-1) / N), evaluated directly so large
        // powers do not accumulate rounding.
        const double arg = 2.0 * kPi * static_cast<double>((static_cast<long long>(n) * (k - 1)) %
                                                            big_n) /
                           static_cast<double>(big_n);
        w[k - 1] = Complex(std::cos(arg), std::sin(arg)) / std::sqrt(static_cast<double>(big_n));
    }
    return w;
}

/// Matrix whose column (n-1) is w_n, n = 1..N.
inline ComplexMatrix fourier_basis(int big_n) {
    ComplexMatrix w(big_n, big_n);
    for (int n = 1; n <= big_n; ++n) w.col(n - 1) = fourier_vector(n, big_n);
    return w;
}

/// Eigenvalue mu_n = sum_p c_p omega_n^{p-1}.
inline Complex circulant_eigenvalue(const CirculantSpec& spec, int n) {
    const int big_n = spec.size();
    Complex mu(0.0, 0.0);
    for (int p = 1; p <= big_n; ++p) {
        const double arg = 2.0 * kPi * static_cast<double>((static_cast<long long>(n) * (p - 1)) %
                                                            big_n) /
                           static_cast<double>(big_n);
        mu += spec.first_row[p - 1] * Complex(std::cos(arg), std::sin(arg));
    }
    return mu;
}

struct FourierMode {
    int index = 0;             // n in 1..N
    Complex root;              // omega_n
    ComplexVector eigenvector; // w_n, unit norm
    Complex eigenvalue;        // mu_n
};

inline std::vector<FourierMode> circulant_eigensystem(const CirculantSpec& spec) {
    require_valid(spec, "circulant_eigensystem");
    const int big_n = spec.size();
    std::vector<FourierMode> modes;
    modes.reserve(big_n);
    for (int n = 1; n <= big_n; ++n)
        modes.push_back({n, root_of_unity(n, big_n), fourier_vector(n, big_n),
                         circulant_eigenvalue(spec, n)});
    return modes;
}

namespace detail {

inline void require_real(const ComplexMatrix& m, const char* who, double tol = 1e-10) {
    if (m.imag().cwiseAbs().maxCoeff() > tol * std::max(1.0, m.norm()))
        throw Error(std::string(who) + ": imaginary residue exceeds tolerance");
}

}  // namespace detail

/// exp(t A) for circulant A via the spectral sum  sum_n e^{mu_n t} w_n w_{N-n}^T.
/// The result is asserted real (imaginary residue < 1e-10) before extraction.
inline Matrix circulant_exp(const CirculantSpec& spec, double t) {
    require_valid(spec, "circulant_exp");
    if (!std::isfinite(t)) throw InvalidInputError("circulant_exp: t must be finite");
    const int big_n = spec.size();
    const ComplexMatrix w = fourier_basis(big_n);
    ComplexMatrix acc = ComplexMatrix::Zero(big_n, big_n);
    for (int n = 1; n <= big_n; ++n) {
        const Complex mu = circulant_eigenvalue(spec, n);
        const int conj_n = mod_index(big_n - n, big_n);
        acc += std::exp(mu * t) * (w.col(n - 1) * w.col(conj_n - 1).transpose());
    }
    detail::require_real(acc, "circulant_exp");
    return acc.real();
}

/// Spectral reconstruction sum_n mu_n w_n w_{N-n}^T, which rebuilds dense(spec).
inline Matrix spectral_reconstruction(const CirculantSpec& spec) {
    require_valid(spec, "spectral_reconstruction");
    const int big_n = spec.size();
    const ComplexMatrix w = fourier_basis(big_n);
    ComplexMatrix acc = ComplexMatrix::Zero(big_n, big_n);
    for (int n = 1; n <= big_n; ++n) {
        const int conj_n = mod_index(big_n - n, big_n);
        acc += circulant_eigenvalue(spec, n) * (w.col(n - 1) * w.col(conj_n - 1).transpose());
    }
    detail::require_real(acc, "spectral_reconstruction");
    return acc.real();
}

/// True when entry (m,n) depends only on n-m mod N.
inline bool is_circulant(const Matrix& a, double tol = 1e-9) {
    if (a.rows() != a.cols()) return false;
    const int n = static_cast<int>(a.rows());
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    for (int m = 2; m <= n; ++m)
        for (int k = 1; k <= n; ++k)
            if (std::abs(a(m - 1, k - 1) - a(0, mod_index(k - m + 1, n) - 1)) > tol * scale)
                return false;
    return true;
}

}  // namespace cyclicity
