#ifndef MMBM_LOCALTIME_HPP
#define MMBM_LOCALTIME_HPP

#include "mmbm/reflection.hpp"

namespace mmbm {

class LocalTimeError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Transforms of the reflected system observed at inverse local times.
/// ML = E_{x0}[e^{a X(tau_0^L) - q tau_0^L}; J(tau_0^L)] (FL)^-1 and the
/// analogous MU for the upper barrier; FL, FU are the MAP exponents of
/// (X, J) at inverse lower/upper local times; kL, kU their Perron
/// eigenvalues (negative on the admissible alpha interval).
struct LocalTimeTransform {
    double alpha = 0.0;
    double q = 0.0;
    Matrix ML;     // N x N-
    Matrix MU;     // N x N+
    Matrix FL;     // N- x N-
    Matrix FU;     // N+ x N+
    Matrix initL;  // N x N-, initial transform at the lower barrier
    Matrix initU;  // N x N+
    double kL = 0.0;
    double kU = 0.0;
    double rho_plus = 0.0;   // Perron of Lambda+(q)
    double rho_minus = 0.0;  // Perron of Lambda-(q)
};

/// Stationary unused-capacity and overflow rate vectors kappa^L pi^L,
/// kappa^U pi^U (fluid per unit time, split by phase).
struct OverflowRates {
    Vector unused;    // N- entries
    Vector overflow;  // N+ entries
    double kappaL = 0.0;
    double kappaU = 0.0;
    Vector piL;
    Vector piU;
};

/// Admissible alpha interval (rho^-(q), -rho^+(q)) for the transforms.
std::pair<double, double> admissible_alpha(const MmbmModel& model, double q);

LocalTimeTransform localtime_transform(const MmbmModel& model, double B,
                                       double x0, double q, double alpha);

/// E_{x0=B}[e^{a U(tau_0^L) - q tau_0^L}; J(tau_0^L)]. Uses the all-sigma
/// positive closed form when available, otherwise the initial transform.
Matrix busy_period_transform(const MmbmModel& model, double B, double q,
                             double alpha);

/// Stationary overflow/unused capacity rates; requires kappa != 0.
OverflowRates overflow_rates(const MmbmModel& model, double B);

/// Poisson structure of the overflow process of a reflected Brownian
/// motion (sigma2 = 1): jump rate in local-time clock and exponential
/// jump-size rate; both 1/B when mu = 0.
std::pair<double, double> brownian_overflow_process(double mu, double B);

}  // namespace mmbm

#endif
