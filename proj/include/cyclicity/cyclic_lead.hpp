#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cyclicity/circulant.hpp"
#include "cyclicity/ou.hpp"
#include "cyclicity/spectral.hpp"
#include "cyclicity/types.hpp"

namespace cyclicity {

/// Signal-propagation network with a single nonzero propagation coefficient
/// b_p (how receptive sensor n is to sensor n+p-1) and stability margin
/// epsilon.  gcd(p-1, N) = 1 so the signal reaches every sensor.
struct PropagationNetwork {
    int sensors = 0;     // N
    int p = 2;           // index of the nonzero propagation coefficient, 1 < p <= N
    double b_p = -1.0;   // propagation coefficient, <= 0
    double epsilon = 1.0;
};

inline void require_valid(const PropagationNetwork& net, const char* who) {
    if (net.sensors < 2)
        throw InvalidInputError(std::string(who) + ": need at least two sensors");
    if (net.p <= 1 || net.p > net.sensors)
        throw InvalidInputError(std::string(who) + ": p must satisfy 1 < p <= N");
    if (net.b_p > 0.0)
        throw InvalidInputError(std::string(who) + ": propagation coefficient must be <= 0");
    if (!(net.epsilon > 0.0))
        throw InvalidInputError(std::string(who) + ": perturbation epsilon must be positive");
    if (gcd_int(net.p - 1, net.sensors) != 1)
        throw InvalidInputError(std::string(who) + ": gcd(p-1, N) must be 1");
}

/// Friction matrix B(eps) = Circ(eps - b_p, ..., b_p at position p, ...);
/// its stability margin equals eps.
inline CirculantSpec friction_spec(const PropagationNetwork& net) {
    require_valid(net, "friction_spec");
    Vector row = Vector::Zero(net.sensors);
    row[0] = net.epsilon - net.b_p;
    row[net.p - 1] = net.b_p;
    return {row};
}

namespace detail {

inline Complex unit_power(long long exponent, int big_n) {
    const double arg = 2.0 * kPi * static_cast<double>(((exponent % big_n) + big_n) % big_n) /
                       static_cast<double>(big_n);
    return {std::cos(arg), std::sin(arg)};
}

/// Assemble sum_{m,n} coeff(m,n) w_m w_n^T and extract the real skew part.
inline Matrix assemble_spectral_sum(const ComplexMatrix& coeff, const char* who) {
    const int n = static_cast<int>(coeff.rows());
    const ComplexMatrix w = fourier_basis(n);
    ComplexMatrix q = w * coeff * w.transpose();
    require_real(q, who);
    Matrix out = 0.5 * (q.real() - q.real().transpose());
    require_skew(out, who);
    return out;
}

}  // namespace detail

/// Lead matrix for noise of variance d_s injected into sensor s only:
/// (d_s b_p / N) sum_{m,n} (w_m^{p-1} - w_n^{p-1}) w_{m+n}^{1-s}
///                         / (2 eps + b_p (w_m^{p-1} + w_n^{p-1} - 2))  w_m w_n^T.
inline LeadMatrix q_one_sensor(const PropagationNetwork& net, int s, double d_s) {
    require_valid(net, "q_one_sensor");
    const int n = net.sensors;
    if (s < 1 || s > n) throw InvalidInputError("q_one_sensor: sensor index out of range");
    if (d_s < 0.0) throw InvalidInputError("q_one_sensor: noise variance must be >= 0");
    ComplexMatrix coeff(n, n);
    for (int m = 1; m <= n; ++m) {
        const Complex om_m = detail::unit_power(static_cast<long long>(m) * (net.p - 1), n);
        for (int k = 1; k <= n; ++k) {
            const Complex om_k = detail::unit_power(static_cast<long long>(k) * (net.p - 1), n);
            const Complex num = (om_m - om_k) *
                                detail::unit_power(static_cast<long long>(m + k) * (1 - s), n);
            const Complex den = 2.0 * net.epsilon + net.b_p * (om_m + om_k - 2.0);
            coeff(m - 1, k - 1) = (d_s * net.b_p / n) * num / den;
        }
    }
    return {detail::assemble_spectral_sum(coeff, "q_one_sensor"),
            Provenance::closed_form};
}

/// First-regime (eps -> infinity) rank-2 asymptotic matrix: +- d_s b_p/(2 eps)
/// at positions (s+1-p, s) and (s, s+1-p), zero elsewhere.
inline LeadMatrix q_first_regime_one_sensor(const PropagationNetwork& net, int s, double d_s) {
    require_valid(net, "q_first_regime_one_sensor");
    const int n = net.sensors;
    if (s < 1 || s > n)
        throw InvalidInputError("q_first_regime_one_sensor: sensor index out of range");
    Matrix a = Matrix::Zero(n, n);
    const int j = mod_index(s + 1 - net.p, n);
    const double value = d_s * net.b_p / (2.0 * net.epsilon);
    a(j - 1, s - 1) = value;
    a(s - 1, j - 1) = -value;
    return {a, Provenance::asymptotic};
}

/// Limit of the leading eigenvector in the first regime:
/// (i e_s + e_{s+1-p}) / sqrt(2), indices mod N.
inline ComplexVector v1_first_regime_limit(int s, int p, int big_n) {
    if (big_n < 2 || s < 1 || s > big_n || p <= 1 || p > big_n)
        throw InvalidInputError("v1_first_regime_limit: invalid indices");
    ComplexVector v = ComplexVector::Zero(big_n);
    v[s - 1] = Complex(0.0, 1.0) / std::sqrt(2.0);
    v[mod_index(s + 1 - p, big_n) - 1] = Complex(1.0, 0.0) / std::sqrt(2.0);
    return v;
}

/// Second-regime (eps -> 0) limit matrix, with the m = n = N summand set to 0:
/// (d_s / N) sum (w_m^{p-1} - w_n^{p-1}) w_{m+n}^{1-s} / (w_m^{p-1} + w_n^{p-1} - 2) w_m w_n^T.
inline LeadMatrix q_second_regime_one_sensor(const PropagationNetwork& net, int s, double d_s) {
    require_valid(net, "q_second_regime_one_sensor");
    const int n = net.sensors;
    if (s < 1 || s > n)
        throw InvalidInputError("q_second_regime_one_sensor: sensor index out of range");
    ComplexMatrix coeff = ComplexMatrix::Zero(n, n);
    for (int m = 1; m <= n; ++m) {
        const Complex om_m = detail::unit_power(static_cast<long long>(m) * (net.p - 1), n);
        for (int k = 1; k <= n; ++k) {
            if (m == n && k == n) continue;  // 0/0 summand, defined as 0
            const Complex om_k = detail::unit_power(static_cast<long long>(k) * (net.p - 1), n);
            const Complex num = (om_m - om_k) *
                                detail::unit_power(static_cast<long long>(m + k) * (1 - s), n);
            coeff(m - 1, k - 1) = (d_s / n) * num / (om_m + om_k - 2.0);
        }
    }
    return {detail::assemble_spectral_sum(coeff, "q_second_regime_one_sensor"),
            Provenance::asymptotic};
}

namespace detail {

/// Binomial coefficient in double precision: exact 64-bit product for
/// arguments <= 60, log-gamma otherwise (no overflow up to N = 64).
inline double binomial(int m, int r) {
    if (r < 0 || r > m) return 0.0;
    if (r > m - r) r = m - r;
    if (m <= 60) {
        unsigned long long acc = 1;
        for (int i = 1; i <= r; ++i) acc = acc * static_cast<unsigned long long>(m - r + i) / i;
        return static_cast<double>(acc);
    }
    return std::exp(std::lgamma(m + 1.0) - std::lgamma(r + 1.0) - std::lgamma(m - r + 1.0));
}

}  // namespace detail

/// Hermitian second-regime matrix A_N = i A with
/// A_{j,k} = (1/2)^{2N-j-k} (k-j)/(2N-j-k) C(2N-j-k, N-k).
/// The closed-form entry is applied at every (j,k); this is the matrix whose
/// spectra the reference eigenvalue tables tabulate.  (The j=k=N entry is the
/// 0/0 corner and is 0.)
inline ComplexMatrix binomial_matrix(int big_n) {
    if (big_n < 2) throw InvalidInputError("binomial_matrix: N must be >= 2");
    ComplexMatrix a = ComplexMatrix::Zero(big_n, big_n);
    for (int j = 1; j <= big_n; ++j) {
        for (int k = 1; k <= big_n; ++k) {
            const int m = 2 * big_n - j - k;
            if (m == 0 || j == k) continue;
            const double entry =
                std::pow(0.5, m) * (static_cast<double>(k - j) / m) * detail::binomial(m, big_n - k);
            a(j - 1, k - 1) = Complex(0.0, entry);
        }
    }
    return a;
}

/// Lead matrix for independent identical noise of variance d in the trailing
/// L sensors; equals the sum of q_one_sensor over s = N-l+1, l = 1..L.
inline LeadMatrix q_multi_sensor(const PropagationNetwork& net, int trailing, double d) {
    require_valid(net, "q_multi_sensor");
    const int n = net.sensors;
    if (trailing < 1 || trailing > n)
        throw InvalidInputError("q_multi_sensor: trailing block size out of range");
    if (d < 0.0) throw InvalidInputError("q_multi_sensor: noise variance must be >= 0");
    ComplexMatrix coeff(n, n);
    for (int m = 1; m <= n; ++m) {
        const Complex om_m = detail::unit_power(static_cast<long long>(m) * (net.p - 1), n);
        for (int k = 1; k <= n; ++k) {
            const Complex om_k = detail::unit_power(static_cast<long long>(k) * (net.p - 1), n);
            Complex phase_sum(0.0, 0.0);
            for (int l = 1; l <= trailing; ++l)
                phase_sum += detail::unit_power(static_cast<long long>(m + k) * l, n);
            const Complex den = 2.0 * net.epsilon + net.b_p * (om_m + om_k - 2.0);
            coeff(m - 1, k - 1) = (net.b_p * d / n) * (om_m - om_k) * phase_sum / den;
        }
    }
    return {detail::assemble_spectral_sum(coeff, "q_multi_sensor"),
            Provenance::closed_form};
}

/// First-regime leading-eigenvector limit for p = 2, b_2 = -1, d = 1 and
/// noise in the trailing L sensors: N-L-1 zeros followed by
/// i^l sin(l pi / (L+2)), l = 1..L+1, normalized.  The trailing block of the
/// asymptotic matrix is tridiagonal Toeplitz, which fixes this sine profile.
inline ComplexVector v1_multi_first_regime(int trailing, int big_n) {
    if (trailing < 1 || trailing >= big_n)
        throw InvalidInputError("v1_multi_first_regime: need 1 <= L and L + 1 <= N");
    ComplexVector v = ComplexVector::Zero(big_n);
    static const Complex kUnitPowers[4] = {Complex(1, 0), Complex(0, 1), Complex(-1, 0),
                                           Complex(0, -1)};
    double norm2 = 0.0;
    for (int l = 1; l <= trailing + 1; ++l) {
        const double amp = std::sin(l * kPi / (trailing + 2));
        v[big_n - trailing - 2 + l] = kUnitPowers[l % 4] * amp;
        norm2 += amp * amp;
    }
    v /= std::sqrt(norm2);
    return v;
}

/// Circulant lead matrix for identical unit noise in all sensors, plus its
/// eigenvalues by Fourier mode: eigenvalue(q) =
/// i b_p sin(2 pi q (p-1)/N) / (eps - 2 b_p sin^2(pi q (p-1)/N)), mode w_q.
struct AllSensorsLead {
    LeadMatrix lead;
    ComplexVector mode_eigenvalues;  // entry q-1 pairs with eigenvector w_q
};

inline AllSensorsLead q_all_sensors(int big_n, int p, double b_p, double epsilon) {
    // The spectral formula needs no coprimality; only the recovery of the
    // leading mode does (leading_mode_all_sensors raises no-inverse there).
    if (big_n < 2) throw InvalidInputError("q_all_sensors: need at least two sensors");
    if (p <= 1 || p > big_n)
        throw InvalidInputError("q_all_sensors: p must satisfy 1 < p <= N");
    if (b_p > 0.0) throw InvalidInputError("q_all_sensors: propagation coefficient must be <= 0");
    if (!(epsilon > 0.0))
        throw InvalidInputError("q_all_sensors: perturbation epsilon must be positive");
    const ComplexMatrix w = fourier_basis(big_n);
    ComplexMatrix acc = ComplexMatrix::Zero(big_n, big_n);
    ComplexVector eigs(big_n);
    for (int q = 1; q <= big_n; ++q) {
        const double angle = kPi * static_cast<double>((static_cast<long long>(q) * (p - 1)) %
                                                        big_n) /
                             big_n;
        const double sin_sq = std::sin(angle) * std::sin(angle);
        const double coeff = b_p * std::sin(2.0 * angle) / (epsilon - 2.0 * b_p * sin_sq);
        eigs[q - 1] = Complex(0.0, coeff);
        acc += Complex(0.0, -coeff) *
               (w.col(mod_index(big_n - q, big_n) - 1) * w.col(q - 1).transpose());
    }
    detail::require_real(acc, "q_all_sensors");
    Matrix out = 0.5 * (acc.real() - acc.real().transpose());
    require_skew(out, "q_all_sensors");
    return {{out, Provenance::closed_form}, eigs};
}

/// The unique q in 1..N with q (p-1) = 1 (mod N), by extended Euclid.
inline int leading_mode_all_sensors(int big_n, int p) {
    const int a = mod_index(p - 1, big_n);
    if (gcd_int(a, big_n) != 1)
        throw NoInverseError("leading_mode_all_sensors: p-1 has no inverse mod N");
    long long r0 = big_n, r1 = a, t0 = 0, t1 = 1;
    while (r1 != 0) {
        const long long quot = r0 / r1;
        const long long r2 = r0 - quot * r1;
        const long long t2 = t0 - quot * t1;
        r0 = r1; r1 = r2;
        t0 = t1; t1 = t2;
    }
    return mod_index(t0, big_n);
}

/// Cyclic-order permutation sigma(n) = N - (n-1)(p-1), indexed mod N into
/// 1..N; traverses the sensor ring in steps of -(p-1).
inline std::vector<int> cyclic_order_permutation(int big_n, int p) {
    if (gcd_int(mod_index(p - 1, big_n), big_n) != 1)
        throw NoInverseError("cyclic_order_permutation: gcd(p-1, N) must be 1");
    std::vector<int> sigma(big_n);
    for (int n = 1; n <= big_n; ++n)
        sigma[n - 1] = mod_index(static_cast<long long>(big_n) -
                                     static_cast<long long>(n - 1) * (p - 1),
                                 big_n);
    return sigma;
}

/// Companion convention defined by the congruence
/// q (sigma(n) - 1) = n - 1 (mod N), i.e. sigma(n) = 1 + (n-1)(p-1) mod N,
/// where q is the leading mode.  Sorting the components of w_q by this
/// permutation yields nondecreasing principal arguments in [0, 2 pi).  It is
/// the reverse traversal of cyclic_order_permutation; tests surface the
/// orientation mismatch between the two conventions.
inline std::vector<int> cyclic_order_permutation_congruence(int big_n, int p) {
    if (gcd_int(mod_index(p - 1, big_n), big_n) != 1)
        throw NoInverseError("cyclic_order_permutation_congruence: gcd(p-1, N) must be 1");
    std::vector<int> sigma(big_n);
    for (int n = 1; n <= big_n; ++n)
        sigma[n - 1] = mod_index(1 + static_cast<long long>(n - 1) * (p - 1), big_n);
    return sigma;
}

/// True when sigma_b equals sigma_a composed with some cyclic shift of the
/// argument, i.e. sigma_b(n) = sigma_a(n + d - 1 mod N) for a fixed d.
inline bool equal_up_to_cyclic_shift(const std::vector<int>& sigma_a,
                                     const std::vector<int>& sigma_b) {
    const int n = static_cast<int>(sigma_a.size());
    if (static_cast<int>(sigma_b.size()) != n) return false;
    for (int d = 0; d < n; ++d) {
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) ok = sigma_b[i] == sigma_a[(i + d) % n];
        if (ok) return true;
    }
    return false;
}

inline std::vector<int> reversed_permutation(const std::vector<int>& sigma) {
    return std::vector<int>(sigma.rbegin(), sigma.rend());
}

/// One measured-vs-conjectured observation; conjectures are never asserted,
/// only reported.
struct ConjectureObservation {
    std::string quantity;
    double parameter = 0.0;   // usually N or j
    double measured = 0.0;
    double conjectured = 0.0;
    bool satisfied = false;
};

/// Numeric evidence for the asymptotic-binomial-matrix conjectures over the
/// given sizes: Gershgorin radii limits, lambda_1 convergence to 2/pi,
/// principal-minor ordering, interlacing, leading-eigenvector moduli
/// monotonicity and trailing-phase run, the deviation of A_N from the exact
/// second-regime limit, and the multi-sensor second-regime structure.
inline std::vector<ConjectureObservation> numeric_conjecture_checks(const std::vector<int>& sizes) {
    std::vector<ConjectureObservation> out;
    double prev_lam1 = -std::numeric_limits<double>::infinity();
    for (int n : sizes) {
        if (n < 2 || n > 64)
            throw InvalidInputError("numeric_conjecture_checks: sizes must lie in 2..64");
        const ComplexMatrix a = binomial_matrix(n);
        const Vector radii = gershgorin_radii(a);

        // R_{N,N-1} = 1 - N/2^N exactly, and the conjectured limits for small j.
        const double r_identity = 1.0 - n / std::pow(2.0, n);
        out.push_back({"gershgorin_R_{N,N-1}", static_cast<double>(n), radii[n - 2], r_identity,
                       std::abs(radii[n - 2] - r_identity) < 1e-12});
        for (int j = 1; j <= std::min(3, n - 1); ++j) {
            const double limit = detail::binomial(2 * j, j) / std::pow(2.0, 2 * j - 1);
            out.push_back({"gershgorin_limit_j=" + std::to_string(j), static_cast<double>(n),
                           radii[n - 1 - j], limit, radii[n - 1 - j] <= limit + 1e-12});
        }

        const HermitianTopPair top = hermitian_top_eigenpair(a);
        out.push_back({"lambda1_minus_2_over_pi", static_cast<double>(n),
                       std::abs(top.value - 2.0 / kPi), 0.0, true});
        out.push_back({"lambda1_nondecreasing_and_below_1", static_cast<double>(n), top.value,
                       1.0, top.value >= prev_lam1 - 1e-12 && top.value <= 1.0 + 1e-12});
        prev_lam1 = top.value;

        // Strictly increasing component moduli of v1(A_N) over 1..N.
        bool moduli_monotone = true;
        for (int i = 0; i + 1 < n; ++i)
            if (std::abs(top.vector[i]) >= std::abs(top.vector[i + 1]) - 1e-12)
                moduli_monotone = false;
        out.push_back({"v1_moduli_strictly_increasing", static_cast<double>(n),
                       moduli_monotone ? 1.0 : 0.0, 1.0, moduli_monotone});

        // Trailing phase run: 0 = Arg(v_N) < Arg(v_{N-1}) < ... < pi.
        const Vector ph = phases_of(top.vector);
        int run = 1;
        while (run < n) {
            const double cur = ph[n - run], nxt = ph[n - run - 1];
            if (nxt > cur && nxt < kPi) ++run;
            else break;
        }
        out.push_back({"trailing_phase_run_length", static_cast<double>(n),
                       static_cast<double>(run), static_cast<double>(run), run >= 2});

        double worst_interlace = -std::numeric_limits<double>::infinity();
        double prev_minor = std::numeric_limits<double>::infinity();
        bool minors_ordered = true;
        for (int j = 1; j <= n; ++j) {
            worst_interlace = std::max(worst_interlace, interlacing_violation(a, j));
            const double minor_lam1 = hermitian_top_eigenpair(ComplexMatrix(principal_minor(a, j))).value;
            if (minor_lam1 >= prev_minor + 1e-12) minors_ordered = false;
            prev_minor = minor_lam1;
        }
        out.push_back({"interlacing_worst_violation", static_cast<double>(n), worst_interlace,
                       0.0, worst_interlace <= 1e-10});
        out.push_back({"minor_lambda1_decreasing_in_j", static_cast<double>(n),
                       minors_ordered ? 1.0 : 0.0, 1.0, minors_ordered});

        // Deviation between A_N and i * exact second-regime limit (reported
        // only; the single-binomial-term formula drops an O(1) tail).
        if (n <= 16) {
            PropagationNetwork net{n, 2, -1.0, 1.0};
            const Matrix q2 = q_second_regime_one_sensor(net, n, 1.0).matrix;
            const ComplexMatrix diff = a - Complex(0.0, 1.0) * q2.cast<Complex>();
            out.push_back({"binomial_vs_second_regime_frobenius", static_cast<double>(n),
                           diff.norm(), 0.0, true});
        }
    }

    // Multi-sensor second-regime structure at N = 10, L = 4: unimodal moduli
    // with the peak at component N - L, decreasing trailing phases.
    {
        const int n = 10, trailing = 4;
        ComplexMatrix coeff = ComplexMatrix::Zero(n, n);
        for (int m = 1; m <= n; ++m) {
            const Complex om_m = detail::unit_power(m, n);
            for (int k = 1; k <= n; ++k) {
                if (m == n && k == n) continue;
                const Complex om_k = detail::unit_power(k, n);
                Complex phase_sum(0.0, 0.0);
                for (int l = 1; l <= trailing; ++l)
                    phase_sum += detail::unit_power(static_cast<long long>(m + k) * l, n);
                coeff(m - 1, k - 1) = (om_m - om_k) * phase_sum / (om_m + om_k - 2.0) / double(n);
            }
        }
        const Matrix q = detail::assemble_spectral_sum(coeff, "numeric_conjecture_checks");
        const HermitianTopPair top =
            hermitian_top_eigenpair(ComplexMatrix(Complex(0.0, 1.0) * q.cast<Complex>()));
        int peak = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(top.vector[i]) > std::abs(top.vector[peak])) peak = i;
        out.push_back({"multi_sensor_second_regime_peak_component", trailing,
                       static_cast<double>(peak + 1), static_cast<double>(n - trailing + 1),
                       peak + 1 == n - trailing + 1});
    }
    return out;
}

}  // namespace cyclicity
