#include <doctest.h>

#include <random>

#include "mmbm/reflection.hpp"
#include "test_models.hpp"

using namespace mmbm;
using mmbm::testing::cyclic_three;
using mmbm::testing::single_state;
using mmbm::testing::two_state;

TEST_CASE("scalar two-barrier exit: sinh formulas") {
    // From 0 in the strip (-b, a):
    //   E[e^{-q tau_a^+}; tau_a^+ < tau_{-b}^-] = e^{mu a} sinh(b g)/sinh((a+b) g)
    // with g = sqrt(mu^2 + 2q), and the mirrored formula for the lower exit.
    const double mu = 0.3, q = 0.8, a = 1.2, b = 0.7;
    const double g = std::sqrt(mu * mu + 2 * q);
    const MmbmModel m = single_state(mu);
    const CrossingMatrices cm = crossing_matrices(m, q, a, b);
    CHECK(cm.C(0, 0) ==
          doctest::Approx(std::exp(mu * a) * std::sinh(b * g) /
                          std::sinh((a + b) * g)).epsilon(1e-11));
    CHECK(cm.D(0, 0) ==
          doctest::Approx(std::exp(-mu * b) * std::sinh(a * g) /
                          std::sinh((a + b) * g)).epsilon(1e-11));

    // q = 0: ruin probabilities, C + D = 1.
    const CrossingMatrices cm0 = crossing_matrices(m, 0.0, a, b);
    CHECK(cm0.C(0, 0) + cm0.D(0, 0) == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(cm0.C(0, 0) ==
          doctest::Approx((std::exp(2 * mu * b) - 1) /
                          (std::exp(2 * mu * b) - std::exp(-2 * mu * a)))
              .epsilon(1e-11));
}

TEST_CASE("driftless scalar exit probabilities are linear in the level") {
    const MmbmModel m = single_state(0.0);
    const double a = 2.0, b = 0.5;
    const CrossingMatrices cm = crossing_matrices_zero_drift(m, a, b);
    CHECK(cm.C(0, 0) == doctest::Approx(b / (a + b)).epsilon(1e-10));
    CHECK(cm.D(0, 0) == doctest::Approx(a / (a + b)).epsilon(1e-10));
}

TEST_CASE("exit matrices are sub-stochastic and exhaustive at q = 0") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 6; ++rep) {
        const MmbmModel m = mmbm::testing::random_model(rng, 3);
        const CrossingMatrices cm = crossing_matrices(m, 0.0, 1.0, 0.8);
        const Vector total = cm.C.rowwise().sum() + cm.D.rowwise().sum();
        CHECK((total - Vector::Ones(3)).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK(cm.C.minCoeff() >= -1e-10);
        CHECK(cm.D.minCoeff() >= -1e-10);

        const CrossingMatrices cmq = crossing_matrices(m, 1.3, 1.0, 0.8);
        const Vector tq = cmq.C.rowwise().sum() + cmq.D.rowwise().sum();
        CHECK(tq.maxCoeff() <= 1.0 + 1e-9);
        CHECK(tq.minCoeff() >= -1e-10);
    }
}

TEST_CASE("stationary law of reflected Brownian motion") {
    // Density proportional to e^{2 mu x} on [0, B]; no boundary atoms.
    const double mu = -0.6, B = 1.5;
    const ReflectedLaw law = stationary_law(single_state(mu), B, 41);
    CHECK(law.mass0(0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(law.massB(0) == doctest::Approx(0.0).epsilon(1e-9));
    const double z = std::exp(2 * mu * B) - 1;
    for (int k = 0; k < law.grid.size(); ++k) {
        const double x = law.grid(k);
        const double cdf = (std::exp(2 * mu * x) - 1) / z;
        CHECK(law.cdf(k, 0) == doctest::Approx(cdf).epsilon(1e-8));
        CHECK(law.survival(k, 0) == doctest::Approx(1 - cdf).epsilon(1e-8));
        CHECK(law.density(k, 0) ==
              doctest::Approx(2 * mu * std::exp(2 * mu * x) / z).epsilon(1e-6));
    }
}

TEST_CASE("stationary law of driftless reflected Brownian motion is uniform") {
    const double B = 2.0;
    const ReflectedLaw law = stationary_law(single_state(0.0), B, 21);
    for (int k = 0; k < law.grid.size(); ++k) {
        CHECK(law.cdf(k, 0) == doctest::Approx(law.grid(k) / B).epsilon(1e-8));
        CHECK(law.density(k, 0) == doctest::Approx(1.0 / B).epsilon(1e-6));
    }
}

TEST_CASE("stationary law of a finite-buffer on/off fluid queue") {
    // mu = (1, -2), Q = [[-1,1],[1,-1]], B = 2. Level crossing gives density
    // f(x) = c (2, 1) e^{-x/2}; atom balance gives P(W=0, J=2) = 2c and
    // P(W=B, J=1) = 2c e^{-B/2}; normalization c = 1/(8 - 4 e^{-B/2}).
    // The law below is conditional on J (pi = (1/2, 1/2)).
    const double B = 2.0;
    const double c = 1.0 / (8.0 - 4.0 * std::exp(-B / 2));
    const MmbmModel m = two_state(1.0, -2.0, 0.0, 0.0);
    const ReflectedLaw law = stationary_law(m, B, 9);
    CHECK(law.mass0(0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(law.mass0(1) == doctest::Approx(4 * c).epsilon(1e-9));
    CHECK(law.massB(0) == doctest::Approx(4 * c * std::exp(-B / 2)).epsilon(1e-9));
    CHECK(law.massB(1) == doctest::Approx(0.0).epsilon(1e-9));
    for (int k = 0; k + 1 < law.grid.size(); ++k) {  // x = B adds the atom
        const double x = law.grid(k);
        const double e = std::exp(-x / 2);
        CHECK(law.cdf(k, 0) == doctest::Approx(8 * c * (1 - e)).epsilon(1e-8));
        CHECK(law.cdf(k, 1) == doctest::Approx(4 * c * (2 - e)).epsilon(1e-8));
    }
    CHECK(law.cdf(law.grid.size() - 1, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(law.cdf(law.grid.size() - 1, 1) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("stationary law sanity across mixed models") {
    std::mt19937_64 rng(29);
    for (int rep = 0; rep < 5; ++rep) {
        const MmbmModel m = mmbm::testing::random_model(rng, 4);
        const double B = 1.3;
        const ReflectedLaw law = stationary_law(m, B, 17);
        const int n = m.size();
        for (int i = 0; i < n; ++i) {
            CHECK(law.mass0(i) >= -1e-9);
            CHECK(law.massB(i) >= -1e-9);
            for (int k = 0; k < law.grid.size(); ++k) {
                CHECK(law.cdf(k, i) >= -1e-8);
                CHECK(law.cdf(k, i) <= 1 + 1e-8);
                if (k > 0) CHECK(law.cdf(k, i) >= law.cdf(k - 1, i) - 1e-8);
                // No interior atoms: survival + cdf = 1 away from barriers.
                if (law.grid(k) > 0 && law.grid(k) < B)
                    CHECK(law.survival(k, i) + law.cdf(k, i) ==
                          doctest::Approx(1.0).epsilon(1e-7));
            }
            CHECK(law.cdf(law.grid.size() - 1, i) == doctest::Approx(1.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("explicit grid overload agrees with the uniform grid") {
    const MmbmModel m = cyclic_three();
    const ReflectedLaw a = stationary_law(m, 1.0, 11);
    const ReflectedLaw b = stationary_law(m, 1.0, a.grid);
    CHECK((a.cdf - b.cdf).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((a.survival - b.survival).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("exponential-epoch law: bounds and monotonicity") {
    const MmbmModel m = cyclic_three();
    const double q = 0.7, B = 1.1;
    // P_i(J(e_q) = j), an upper bound for the joint law at every level.
    const Matrix phase = q * (q * Matrix::Identity(3, 3) - m.Q).inverse();
    for (bool top : {false, true}) {
        const Matrix e1 = exp_epoch_law(m, B, q, top, 0.4);
        const Matrix e2 = exp_epoch_law(m, B, q, top, 0.9);
        CHECK(e2.minCoeff() >= -1e-9);
        CHECK((e1 - e2).minCoeff() >= -1e-9);  // monotone in the level
        CHECK((phase - e1).minCoeff() >= -1e-9);
    }
    CHECK_THROWS_AS(exp_epoch_law(m, B, q, false, 0.0), ReflectionError);
    CHECK_THROWS_AS(exp_epoch_law(m, B, q, false, B + 1), ReflectionError);
    CHECK_THROWS_AS(exp_epoch_law(m, B, 0.0, false, 0.5), ReflectionError);
}

TEST_CASE("exponential-epoch law: diffusive models have no atoms") {
    // All sigma > 0: W(e_q) puts no mass on the barriers, so the joint law
    // tends to the phase law as the level vanishes.
    const MmbmModel m = single_state(0.4);
    const double q = 1.2, B = 1.0;
    for (bool top : {false, true}) {
        CHECK(exp_epoch_law(m, B, q, top, 1e-8)(0, 0) ==
              doctest::Approx(1.0).epsilon(1e-5));
    }
}

TEST_CASE("exponential-epoch law: symmetric scalar model mirrors") {
    // Driftless reflected Brownian motion: starting at the bottom,
    // P(W(e_q) >= x) equals P(W(e_q) <= B - x) starting at the top.
    const MmbmModel m = single_state(0.0);
    const double B = 1.0, q = 1.4;
    for (double x : {0.2, 0.5, 0.8}) {
        const double from_bottom = exp_epoch_law(m, B, q, false, x)(0, 0);
        const double from_top = exp_epoch_law(m, B, q, true, B - x)(0, 0);
        CHECK(from_bottom == doctest::Approx(1.0 - from_top).epsilon(1e-8));
    }
}
