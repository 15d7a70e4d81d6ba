#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "cyclicity/cyclic_lead.hpp"
#include "cyclicity/ou.hpp"
#include "cyclicity/spectral.hpp"
#include "cyclicity/types.hpp"

namespace cyclicity {

/// Chain-of-offsets model: x_n(t) = c_n phi(t - alpha_n) with phi a
/// P-periodic signal of finite Fourier support.
struct PeriodicCOOM {
    double period = 1.0;
    std::map<int, Complex> fourier;  // harmonic index k >= 0 -> coefficient
    Vector scales;                   // c_n > 0
    Vector offsets;                  // alpha_n, reduced into [0, P)
};

inline void require_valid(const PeriodicCOOM& model, const char* who) {
    if (!(model.period > 0.0))
        throw InvalidInputError(std::string(who) + ": period must be positive");
    if (model.scales.size() != model.offsets.size())
        throw InvalidInputError(std::string(who) + ": scales/offsets length mismatch");
    bool any = false;
    for (const auto& [k, coeff] : model.fourier) {
        if (k < 0) throw InvalidInputError(std::string(who) + ": harmonic indices must be >= 0");
        if (std::abs(coeff) > 0.0) any = true;
    }
    if (!any)
        throw InvalidInputError(std::string(who) + ": at least one Fourier coefficient required");
    for (int i = 0; i < model.scales.size(); ++i) {
        if (!(model.scales[i] > 0.0))
            throw InvalidInputError(std::string(who) + ": scales must be positive");
        if (model.offsets[i] < 0.0 || model.offsets[i] >= model.period)
            throw InvalidInputError(std::string(who) + ": offsets must lie in [0, P)");
    }
}

/// Evaluate component n of the model at time t (real part of the series).
inline double evaluate_component(const PeriodicCOOM& model, int n, double t) {
    const double shifted = t - model.offsets[n - 1];
    double value = 0.0;
    for (const auto& [k, coeff] : model.fourier) {
        const double arg = 2.0 * kPi * k * shifted / model.period;
        const Complex e(std::cos(arg), std::sin(arg));
        value += (coeff * e).real();
        if (k > 0) value += (std::conj(coeff) * std::conj(e)).real();  // negative harmonic
    }
    return model.scales[n - 1] * value;
}

/// Periodic cross-correlation (f * g)(tau) = int_0^P f(t - tau) g(t) dt on a
/// trapezoid grid; spectrally accurate for smooth periodic integrands.
inline Vector cross_correlation(const std::function<double(double)>& f,
                                const std::function<double(double)>& g, double period,
                                const Vector& displacements, int grid_points = 4096) {
    if (!(period > 0.0))
        throw InvalidInputError("cross_correlation: period must be positive");
    if (grid_points < 2048) grid_points = 2048;
    Vector out(displacements.size());
    const double h = period / grid_points;
    for (int i = 0; i < displacements.size(); ++i) {
        const double tau = displacements[i];
        double acc = 0.0;
        for (int j = 0; j < grid_points; ++j) {
            const double t = j * h;
            acc += f(t - tau) * g(t);
        }
        out[i] = acc * h;
    }
    return out;
}

/// Signed area of the closed polygon with vertices (x_k, y_k), via the
/// shoelace formula (wrap edge included); positive for counterclockwise.
inline double oriented_area(const Vector& x, const Vector& y) {
    if (x.size() != y.size())
        throw InvalidInputError("oriented_area: sample lengths differ");
    const int k = static_cast<int>(x.size());
    if (k < 2) throw InvalidInputError("oriented_area: need at least two samples");
    double acc = 0.0;
    for (int i = 0; i + 1 < k; ++i) acc += x[i] * y[i + 1] - x[i + 1] * y[i];
    acc += x[k - 1] * y[0] - x[0] * y[k - 1];
    return 0.5 * acc;
}

/// Lead matrix of the model over one period:
/// A_{m,n} = 4 pi c_m c_n sum_{k >= 1} k |phi_k|^2 sin(2 pi k (alpha_n - alpha_m)/P).
inline LeadMatrix coom_lead_matrix(const PeriodicCOOM& model) {
    require_valid(model, "coom_lead_matrix");
    const int n = static_cast<int>(model.scales.size());
    Matrix a = Matrix::Zero(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < r; ++c) {
            double entry = 0.0;
            for (const auto& [k, coeff] : model.fourier) {
                if (k < 1) continue;
                entry += k * std::norm(coeff) *
                         std::sin(2.0 * kPi * k * (model.offsets[c] - model.offsets[r]) /
                                  model.period);
            }
            entry *= 4.0 * kPi * model.scales[r] * model.scales[c];
            a(r, c) = entry;
            a(c, r) = -entry;
        }
    }
    return {a, Provenance::theoretical};
}

/// The rank-2 factor pair for a single-harmonic model:
/// a_n = 2 sqrt(pi k) |phi_k| c_n cos(2 pi k alpha_n / P), b_n likewise with
/// sine, so that a b^T - b a^T equals coom_lead_matrix exactly.
inline std::pair<Vector, Vector> one_harmonic_vectors(const PeriodicCOOM& model) {
    require_valid(model, "one_harmonic_vectors");
    int harmonic = 0;
    Complex coeff(0.0, 0.0);
    for (const auto& [k, c] : model.fourier) {
        if (k >= 1 && std::abs(c) > 0.0) {
            if (harmonic != 0)
                throw InvalidInputError("one_harmonic_vectors: model has multiple harmonics");
            harmonic = k;
            coeff = c;
        }
    }
    if (harmonic == 0)
        throw InvalidInputError("one_harmonic_vectors: model has no positive harmonic");
    const int n = static_cast<int>(model.scales.size());
    const double amp = 2.0 * std::sqrt(kPi * harmonic) * std::abs(coeff);
    Vector a(n), b(n);
    for (int i = 0; i < n; ++i) {
        const double arg = 2.0 * kPi * harmonic * model.offsets[i] / model.period;
        a[i] = amp * model.scales[i] * std::cos(arg);
        b[i] = amp * model.scales[i] * std::sin(arg);
    }
    return {a, b};
}

/// Greedy cyclic order of offsets: sigma(1) is the index of the smallest
/// offset; sigma(n) is the smallest unused index minimizing
/// (alpha_m - alpha_{sigma(n-1)}) mod P.  Ties break toward the lower index.
inline std::vector<int> offset_cyclic_order(const Vector& offsets, double period) {
    if (!(period > 0.0))
        throw InvalidInputError("offset_cyclic_order: period must be positive");
    const int n = static_cast<int>(offsets.size());
    if (n < 1) throw InvalidInputError("offset_cyclic_order: need at least one offset");
    auto forward_gap = [&](double from, double to) {
        double gap = std::fmod(to - from, period);
        if (gap < 0.0) gap += period;
        return gap;
    };
    std::vector<int> order;
    std::vector<bool> used(n, false);
    int first = 0;
    for (int i = 1; i < n; ++i)
        if (offsets[i] < offsets[first]) first = i;
    order.push_back(first + 1);
    used[first] = true;
    for (int step = 1; step < n; ++step) {
        const double from = offsets[order.back() - 1];
        int pick = -1;
        double best = 0.0;
        for (int m = 0; m < n; ++m) {
            if (used[m]) continue;
            const double gap = forward_gap(from, offsets[m]);
            if (pick < 0 || gap < best - 1e-15) {
                pick = m;
                best = gap;
            }
        }
        order.push_back(pick + 1);
        used[pick] = true;
    }
    return order;
}

/// Result of recovering a cyclic order from a lead matrix: the ascending
/// argsort of the leading-eigenvector phases in [0, 2 pi), plus diagnostics.
struct PhaseOrderReport {
    std::vector<int> order;
    double dominance_ratio = 0.0;  // |lambda_1 / lambda_3|, +inf sentinel for rank 2
    SkewSpectrum spectrum;
};

inline PhaseOrderReport phase_order_recovery(const LeadMatrix& lead) {
    if (lead.matrix.norm() == 0.0)
        throw UndefinedOrderError("phase_order_recovery: zero lead matrix has no order");
    PhaseOrderReport report;
    report.spectrum = skew_eigendecomposition(lead.matrix);
    report.order = argsort_ascending(phases_in_two_pi(report.spectrum.leading_eigenvector));
    report.dominance_ratio =
        lead.matrix.rows() >= 3 ? eigenvalue_ratio(lead.matrix)
                                : std::numeric_limits<double>::infinity();
    return report;
}

/// Match quality of a recovered order against an expected one, modulo cyclic
/// shift and the conjugation orientation of the leading eigenvector (which
/// reverses the phase order).
struct RecoveryQuality {
    bool matched = false;
    bool reversed = false;  // true when the conjugate orientation matched
};

inline RecoveryQuality compare_cyclic_orders(const std::vector<int>& recovered,
                                             const std::vector<int>& expected) {
    if (equal_up_to_cyclic_shift(expected, recovered)) return {true, false};
    std::vector<int> flipped(recovered.rbegin(), recovered.rend());
    if (equal_up_to_cyclic_shift(expected, flipped)) return {true, true};
    return {false, false};
}

}  // namespace cyclicity
