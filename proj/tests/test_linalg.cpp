#include <doctest.h>

#include <random>

#include "mmbm/linalg.hpp"
#include "test_models.hpp"

using namespace mmbm;
using mmbm::testing::single_state;
using mmbm::testing::two_state;

namespace {

// Independent oracle: truncated Taylor series, valid for small norms.
Matrix expm_taylor(const Matrix& a, int terms = 30) {
    Matrix acc = Matrix::Identity(a.rows(), a.cols());
    Matrix term = acc;
    for (int k = 1; k <= terms; ++k) {
        term = term * a / k;
        acc += term;
    }
    return acc;
}

Matrix random_generator(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    Matrix q = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            if (i != j) q(i, j) = unif(rng);
        q(i, i) = -q.row(i).sum();
    }
    return q;
}

}  // namespace

TEST_CASE("expm basic cases") {
    CHECK((expm(Matrix::Zero(2, 2)) - Matrix::Identity(2, 2)).norm() == doctest::Approx(0.0));

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = -1;
    d(1, 1) = -2;
    const Matrix ed = expm(d);
    CHECK(ed(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
    CHECK(ed(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-13));
    CHECK(ed(0, 1) == doctest::Approx(0.0));

    Matrix nilp = Matrix::Zero(2, 2);
    nilp(0, 1) = 1;
    Matrix expected(2, 2);
    expected << 1, 1, 0, 1;
    CHECK((expm(nilp) - expected).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("expm matches Taylor oracle for small norms") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-0.25, 0.25);
    for (int rep = 0; rep < 5; ++rep) {
        Matrix a(4, 4);
        for (int i = 0; i < 16; ++i) a(i / 4, i % 4) = unif(rng);
        CHECK((expm(a) - expm_taylor(a)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("expm semigroup property on generators") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> xy(0.0, 5.0);
    for (int rep = 0; rep < 10; ++rep) {
        const Matrix a = random_generator(rng, 3);
        const double x = xy(rng), y = xy(rng);
        const Matrix lhs = expm(a * (x + y));
        const Matrix rhs = expm(a * x) * expm(a * y);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("expm error paths") {
    CHECK_THROWS_AS(expm(Matrix::Zero(2, 3)), LinalgError);
    Matrix big = Matrix::Identity(2, 2) * 1e9;
    CHECK_THROWS_AS(expm(big), LinalgError);
}

TEST_CASE("stationary_of_generator") {
    Matrix q(2, 2);
    q << -1, 1, 1, -1;
    Vector pi = stationary_of_generator(q);
    CHECK(pi(0) == doctest::Approx(0.5).epsilon(1e-13));

    // Hand oracle: balance equations of [[-2,2],[1,-1]] give (1/3, 2/3).
    q << -2, 2, 1, -1;
    pi = stationary_of_generator(q);
    CHECK(pi(0) == doctest::Approx(1.0 / 3).epsilon(1e-13));
    CHECK(pi(1) == doctest::Approx(2.0 / 3).epsilon(1e-13));

    CHECK(stationary_of_generator(Matrix::Zero(1, 1))(0) == doctest::Approx(1.0));
}

TEST_CASE("stationary_of_generator rejects reducible generators") {
    Matrix q = Matrix::Zero(2, 2);
    q(0, 0) = -1;
    q(0, 1) = 1;  // state 1 absorbing
    CHECK_THROWS_AS(stationary_of_generator(q), LinalgError);
}

TEST_CASE("stationary vector is permutation covariant") {
    std::mt19937_64 rng(3);
    const Matrix q = random_generator(rng, 4);
    const Vector pi = stationary_of_generator(q);
    std::vector<int> perm{2, 0, 3, 1};
    Matrix p = Matrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i) p(i, perm[static_cast<std::size_t>(i)]) = 1;
    const Vector pi_p = stationary_of_generator(p * q * p.transpose());
    for (int i = 0; i < 4; ++i)
        CHECK(pi_p(i) == doctest::Approx(pi(perm[static_cast<std::size_t>(i)])).epsilon(1e-12));
}

TEST_CASE("quadratic eigenpairs: single Brownian state") {
    // Roots of s^2/2 + mu s - q = 0 are -mu +/- gamma, gamma = sqrt(mu^2+2q).
    const double mu = -0.7, q = 1.3;
    const double gamma = std::sqrt(mu * mu + 2 * q);
    auto spec = quadratic_eigenpairs(single_state(mu), q);
    REQUIRE(spec.roots.size() == 2);
    std::vector<double> roots{spec.roots[0].real(), spec.roots[1].real()};
    std::sort(roots.begin(), roots.end());
    CHECK(roots[0] == doctest::Approx(-mu - gamma).epsilon(1e-12));
    CHECK(roots[1] == doctest::Approx(-mu + gamma).epsilon(1e-12));
}

TEST_CASE("quadratic eigenpairs: single state at q = 0") {
    auto spec = quadratic_eigenpairs(single_state(-1.0), 0.0);
    REQUIRE(spec.roots.size() == 2);
    REQUIRE(spec.zero_root_index >= 0);
    double other = 0;
    for (std::size_t k = 0; k < 2; ++k)
        if (static_cast<int>(k) != spec.zero_root_index) other = spec.roots[k].real();
    CHECK(other == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("quadratic eigenpairs: two-state fluid") {
    // det F(s) for sigma = 0, mu = (1,-2), Q = [[-1,1],[1,-1]] expands to
    // (s-1)(-2s-1) - 1 = -2s^2 + s, roots {0, 1/2}.
    const MmbmModel m = two_state(1.0, -2.0, 0.0, 0.0);
    auto spec = quadratic_eigenpairs(m, 0.0);
    REQUIRE(spec.roots.size() == 2);
    REQUIRE(spec.zero_root_index >= 0);
    for (std::size_t k = 0; k < 2; ++k) {
        const Complex s = spec.roots[k];
        const ComplexMatrix f = quadratic_pencil(m, 0.0, s);
        CHECK((f * spec.vectors[k]).cwiseAbs().maxCoeff() <= 1e-10);
        if (static_cast<int>(k) != spec.zero_root_index)
            CHECK(s.real() == doctest::Approx(0.5).epsilon(1e-10));
    }
}

TEST_CASE("quadratic eigenpairs: residual and conjugate closure") {
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 8; ++rep) {
        const MmbmModel m = mmbm::testing::random_model(rng, 4);
        for (double q : {0.0, 0.5, 2.0}) {
            auto spec = quadratic_eigenpairs(m, q);
            int expected = 0;
            for (int i = 0; i < 4; ++i)
                expected += m.sigma2(i) > 0 ? 2 : (m.mu(i) != 0 ? 1 : 0);
            CHECK(static_cast<int>(spec.roots.size()) == expected);
            for (std::size_t k = 0; k < spec.roots.size(); ++k) {
                const ComplexMatrix f = quadratic_pencil(m, q, spec.roots[k]);
                const double res = (f * spec.vectors[k]).cwiseAbs().maxCoeff();
                CHECK(res <= 1e-10 * std::max(1.0, f.cwiseAbs().maxCoeff()) * 10);
                // Conjugate closure of the root multiset.
                if (std::abs(spec.roots[k].imag()) > 1e-12) {
                    bool found = false;
                    for (const Complex& other : spec.roots)
                        if (std::abs(other - std::conj(spec.roots[k])) <
                            1e-8 * (1.0 + std::abs(other)))
                            found = true;
                    CHECK(found);
                }
            }
        }
    }
}

TEST_CASE("quadratic eigenpairs: double zero root at kappa = 0 is rejected") {
    const MmbmModel m = two_state(1.0, -1.0, 1.0, 1.0);  // symmetric, kappa = 0
    CHECK_THROWS_AS(quadratic_eigenpairs(m, 0.0), LinalgError);
    // The zero-drift route merges the double root into a single flagged zero.
    auto spec = quadratic_eigenpairs(m, 0.0, /*allow_double_zero=*/true);
    CHECK(spec.zero_root_index >= 0);
    CHECK(spec.roots.size() == 3);
}
