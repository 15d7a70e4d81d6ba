#include <catch2/catch.hpp>

#include "cyclicity/circulant.hpp"
#include "cyclicity/ou.hpp"
#include "cyclicity/simulate.hpp"
#include "support/oracles.hpp"

using namespace cyclicity;

namespace {

CirculantSpec reference_spec() {
    Vector row(5);
    row << 2.1, -0.2, -0.4, -0.6, -0.8;
    return {row};
}

}  // namespace

TEST_CASE("stability check", "[ou]") {
    SECTION("reference circulant example: stable with margin 0.1") {
        const StabilityReport rep = check_stability(dense(reference_spec()));
        REQUIRE(rep.stable);
        REQUIRE(rep.margin == Approx(0.1).margin(1e-10));
    }
    SECTION("zero row sum sits on the stability boundary") {
        Vector row(3);
        row << 2.0, -1.0, -1.0;
        const StabilityReport rep = check_stability(dense(CirculantSpec{row}));
        REQUIRE_FALSE(rep.stable);
        REQUIRE(std::abs(rep.margin) < 1e-12);
    }
    SECTION("identity is stable") {
        REQUIRE(check_stability(Matrix::Identity(4, 4)).stable);
    }
    SECTION("non-square input is rejected") {
        REQUIRE_THROWS_AS(check_stability(Matrix::Zero(2, 3)), InvalidInputError);
    }
}

TEST_CASE("stationary covariance", "[ou]") {
    SECTION("scalar case S = sigma^2 / (2b)") {
        Matrix b(1, 1), d(1, 1);
        b << 1.7;
        d << 0.5 * 2.3 * 2.3;  // sigma = 2.3
        REQUIRE(stationary_covariance(b, d).matrix(0, 0) ==
                Approx(2.3 * 2.3 / (2.0 * 1.7)).epsilon(1e-12));
    }
    SECTION("symmetric positive definite B with D = I gives S = B^{-1}") {
        Matrix b(2, 2);
        b << 1.2, -0.2, -0.2, 1.2;
        const Matrix s = stationary_covariance(b, Matrix::Identity(2, 2)).matrix;
        REQUIRE((b * s - Matrix::Identity(2, 2)).norm() < 1e-12);
    }
    SECTION("circulant case agrees with the quadrature oracle") {
        const Matrix b = dense(reference_spec());
        const Matrix d = Matrix::Identity(5, 5);
        const Matrix s = stationary_covariance(b, d).matrix;
        const Matrix s_quad = oracles::quadrature_stationary_covariance(b, d);
        REQUIRE((s - s_quad).norm() / s_quad.norm() < 1e-6);
    }
    SECTION("Lyapunov residual and PSD invariants hold on random instances") {
        SplitMix64 rng(23);
        for (int trial = 0; trial < 10; ++trial) {
            const int n = 2 + static_cast<int>(rng.next() % 7);
            const CirculantSpec spec = oracles::random_stable_circulant(rng, n);
            const Matrix d = oracles::random_psd(rng, n);
            const Matrix s = stationary_covariance(dense(spec), d).matrix;
            REQUIRE((dense(spec) * s + s * dense(spec).transpose() - 2.0 * d).norm() <=
                    1e-8 * std::max(1.0, d.norm()));
            REQUIRE(min_symmetric_eigenvalue(s) >= -1e-12);
        }
    }
    SECTION("unstable and near-unstable friction are refused") {
        Vector row(3);
        row << 2.0, -1.0, -1.0;
        REQUIRE_THROWS_AS(stationary_covariance(dense(CirculantSpec{row}), Matrix::Identity(3, 3)),
                          StabilityError);
        Matrix b(1, 1), d(1, 1);
        b << 1e-11;  // below the 1e-10 near-instability floor
        d << 1.0;
        REQUIRE_THROWS_AS(stationary_covariance(b, d), StabilityError);
    }
    SECTION("asymmetric diffusion is rejected") {
        Matrix d(2, 2);
        d << 1.0, 0.3, -0.3, 1.0;
        REQUIRE_THROWS_AS(stationary_covariance(Matrix::Identity(2, 2), d), InvalidInputError);
    }
    SECTION("permutation similarity: S(P B P^T, P D P^T) = P S P^T") {
        SplitMix64 rng(29);
        const CirculantSpec spec = oracles::random_stable_circulant(rng, 5);
        const Matrix d = oracles::random_psd(rng, 5);
        Matrix p = Matrix::Zero(5, 5);
        const int perm[5] = {2, 0, 4, 1, 3};
        for (int i = 0; i < 5; ++i) p(i, perm[i]) = 1.0;
        const Matrix lhs = stationary_covariance(Matrix(p * dense(spec) * p.transpose()),
                                                 Matrix(p * d * p.transpose()))
                               .matrix;
        const Matrix rhs = p * stationary_covariance(dense(spec), d).matrix * p.transpose();
        REQUIRE((lhs - rhs).norm() < 1e-10 * std::max(1.0, rhs.norm()));
    }
}

TEST_CASE("green function", "[ou]") {
    const Matrix b = dense(reference_spec());
    SECTION("G(0) = I") {
        REQUIRE((green_function(b, 0.0) - Matrix::Identity(5, 5)).norm() < 1e-14);
    }
    SECTION("scalar case") {
        Matrix one(1, 1);
        one << 0.8;
        REQUIRE(green_function(one, 1.5)(0, 0) == Approx(std::exp(-1.2)).epsilon(1e-12));
    }
    SECTION("semigroup property") {
        REQUIRE((green_function(b, 0.9) - green_function(b, 0.5) * green_function(b, 0.4)).norm() <
                1e-10);
    }
    SECTION("matches the circulant spectral exponential") {
        const CirculantSpec neg{Vector(-reference_spec().first_row)};
        REQUIRE((green_function(b, 0.7) - circulant_exp(neg, 0.7)).norm() < 1e-10);
    }
    SECTION("negative time is rejected") {
        REQUIRE_THROWS_AS(green_function(b, -0.1), InvalidInputError);
    }
}

TEST_CASE("theoretical lead matrix", "[ou]") {
    SECTION("symmetric friction is time-reversible: Q = 0") {
        Matrix b(2, 2);
        b << 1.2, -0.2, -0.2, 1.2;
        const Matrix q = theoretical_lead_matrix(b, 0.5 * Matrix::Identity(2, 2)).matrix;
        REQUIRE(q.norm() < 1e-12);
    }
    SECTION("circulant closed form matches the Lyapunov route") {
        const Matrix d = 0.5 * Matrix::Identity(5, 5);  // Sigma = I
        const Matrix q_lyap = theoretical_lead_matrix(dense(reference_spec()), d).matrix;
        const Matrix q_closed = cyclic_lead_matrix(reference_spec(), d).matrix;
        REQUIRE((q_lyap - q_closed).norm() < 1e-9);
    }
    SECTION("trace and diagonal vanish; skewness holds") {
        SplitMix64 rng(31);
        for (int trial = 0; trial < 6; ++trial) {
            const int n = 2 + static_cast<int>(rng.next() % 9);
            const CirculantSpec spec = oracles::random_stable_circulant(rng, n);
            const Matrix d = oracles::random_psd(rng, n);
            const Matrix q = theoretical_lead_matrix(dense(spec), d).matrix;
            REQUIRE(std::abs(q.trace()) < 1e-12 * std::max(1.0, q.norm()));
            REQUIRE(q.diagonal().cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, q.norm()));
            REQUIRE(skew_residual(q) <= 1e-10 * std::max(1.0, q.norm()));
        }
    }
}

TEST_CASE("cyclic lead matrix", "[ou]") {
    SECTION("zero diffusion gives zero lead matrix") {
        REQUIRE(cyclic_lead_matrix(reference_spec(), Matrix::Zero(5, 5)).matrix.norm() < 1e-14);
    }
    SECTION("circulant diffusion keeps Q circulant") {
        const Matrix q = cyclic_lead_matrix(reference_spec(), Matrix(2.0 * Matrix::Identity(5, 5)))
                             .matrix;
        REQUIRE(is_circulant(q));
    }
    SECTION("spectral stationary covariance matches the Lyapunov route") {
        SplitMix64 rng(37);
        const CirculantSpec spec = oracles::random_stable_circulant(rng, 6);
        const Matrix d = oracles::random_psd(rng, 6);
        const Matrix s_spec = cyclic_stationary_covariance(spec, d).matrix;
        const Matrix s_lyap = stationary_covariance(dense(spec), d).matrix;
        REQUIRE((s_spec - s_lyap).norm() < 1e-9 * std::max(1.0, s_lyap.norm()));
    }
}

TEST_CASE("autocovariance", "[ou]") {
    const CirculantSpec spec = reference_spec();
    OUParams params{dense(spec), Matrix::Identity(5, 5)};
    const Matrix s = stationary_covariance(params.friction, diffusion_matrix(params)).matrix;

    SECTION("Gamma(t, t) = S for all t, including t = 0") {
        REQUIRE((autocovariance(params, 0.0, 0.0) - s).norm() < 1e-8);
        REQUIRE((autocovariance(params, 0.8, 0.8) - s).norm() < 1e-8);
    }
    SECTION("stationarity: Gamma(t+h, t) does not depend on t") {
        const Matrix a = autocovariance(params, 0.6, 0.0);
        const Matrix b = autocovariance(params, 1.9, 1.3);
        REQUIRE((a - b).norm() < 1e-8);
    }
    SECTION("matches a fine-grid Simpson oracle") {
        const double s_time = 0.9, t_time = 0.5;
        const Matrix d = diffusion_matrix(params);
        Matrix expected = (-s_time * params.friction).exp() * s *
                          Matrix((-t_time * params.friction).exp()).transpose();
        expected += 2.0 * oracles::simpson_matrix(
                              [&](double u) {
                                  return Matrix(Matrix((-(s_time - u) * params.friction).exp()) *
                                                d *
                                                Matrix((-(t_time - u) * params.friction).exp())
                                                    .transpose());
                              },
                              std::min(s_time, t_time));
        REQUIRE((autocovariance(params, s_time, t_time) - expected).norm() < 1e-8);
    }
    SECTION("negative times are rejected") {
        REQUIRE_THROWS_AS(autocovariance(params, -0.1, 0.5), InvalidInputError);
    }
}

TEST_CASE("flux coefficient", "[ou]") {
    SECTION("symmetric friction with identity diffusion has zero flux") {
        Matrix b(2, 2);
        b << 1.2, -0.2, -0.2, 1.2;
        REQUIRE(flux_coefficient(b, Matrix::Identity(2, 2)).norm() < 1e-12);
    }
    SECTION("scalar process has zero flux") {
        Matrix b(1, 1), d(1, 1);
        b << 0.7;
        d << 1.0;
        REQUIRE(flux_coefficient(b, d).norm() < 1e-14);
    }
    SECTION("circulant case assembles to -Q S^{-1}") {
        const Matrix b = dense(reference_spec());
        const Matrix d = Matrix::Identity(5, 5);
        const Matrix s = stationary_covariance(b, d).matrix;
        const Matrix q = theoretical_lead_matrix(b, d).matrix;
        const Matrix expected = -q * s.inverse();
        REQUIRE((flux_coefficient(b, d) - expected).norm() < 1e-10 * std::max(1.0, expected.norm()));
    }
    SECTION("singular stationary covariance is refused") {
        // D = 0 forces S = 0.
        REQUIRE_THROWS_AS(flux_coefficient(Matrix::Identity(3, 3), Matrix::Zero(3, 3)),
                          SingularCovarianceError);
    }
}
