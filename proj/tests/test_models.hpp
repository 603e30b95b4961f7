#ifndef MMBM_TEST_MODELS_HPP
#define MMBM_TEST_MODELS_HPP

#include <random>

#include "mmbm/model.hpp"

namespace mmbm::testing {

inline MmbmModel single_state(double mu, double sigma2 = 1.0) {
    MmbmModel m;
    m.Q = Matrix::Zero(1, 1);
    m.mu = Vector::Constant(1, mu);
    m.sigma2 = Vector::Constant(1, sigma2);
    return m;
}

inline MmbmModel two_state(double mu1, double mu2, double s1, double s2,
                           double q12 = 1.0, double q21 = 1.0) {
    MmbmModel m;
    m.Q.resize(2, 2);
    m.Q << -q12, q12, q21, -q21;
    m.mu.resize(2);
    m.mu << mu1, mu2;
    m.sigma2.resize(2);
    m.sigma2 << s1, s2;
    return m;
}

inline MmbmModel cyclic_three() {
    MmbmModel m;
    m.Q.resize(3, 3);
    m.Q << -2, 2, 0, 0, -1, 1, 3, 0, -3;
    m.mu.resize(3);
    m.mu << 1.0, -2.0, 0.5;
    m.sigma2.resize(3);
    m.sigma2 << 1.0, 0.5, 2.0;
    return m;
}

/// Random irreducible model; mixed sigma composition controlled by
/// zero_sigma_prob. Drift is recentered away from kappa = 0.
inline MmbmModel random_model(std::mt19937_64& rng, int n,
                              double zero_sigma_prob = 0.3,
                              bool ensure_nonzero_drift = true) {
    std::uniform_real_distribution<double> unif(0.2, 2.0);
    std::uniform_real_distribution<double> drift(-2.0, 2.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    MmbmModel m;
    m.Q = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            if (i != j) m.Q(i, j) = unif(rng);
        m.Q(i, i) = -m.Q.row(i).sum();
    }
    m.mu.resize(n);
    m.sigma2.resize(n);
    for (int i = 0; i < n; ++i) {
        m.mu(i) = drift(rng);
        m.sigma2(i) = coin(rng) < zero_sigma_prob ? 0.0 : unif(rng);
        if (m.sigma2(i) == 0 && std::abs(m.mu(i)) < 0.1)
            m.mu(i) = m.mu(i) < 0 ? -0.5 : 0.5;
    }
    if (ensure_nonzero_drift && std::abs(asymptotic_drift(m)) < 0.05) {
        m.mu.array() += 0.3;
        if (std::abs(asymptotic_drift(m)) < 0.05) m.mu.array() += 0.3;
    }
    return m;
}

}  // namespace mmbm::testing

#endif
