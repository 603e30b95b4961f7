#ifndef MMBM_REFLECTION_HPP
#define MMBM_REFLECTION_HPP

#include "mmbm/passage.hpp"

namespace mmbm {

/// Reflection strip [0, B] with an initial level.
struct StripSpec {
    double B = 1.0;
    double x0 = 0.0;
};

class ReflectionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Two-barrier exit matrices for the free process started in the interior:
/// C(a,b) = P(tau_a^+ < tau_b^-, J(tau_a^+)),
/// D(a,b) = P(tau_b^- < tau_a^+, J(tau_b^-)).
struct CrossingMatrices {
    double a = 0.0;
    double b = 0.0;
    Matrix C;    // N x N+
    Matrix D;    // N x N-
    Matrix Kp;   // N+ x N+, (I - Pi-_+ e^{B Lam-} Pi+_- e^{B Lam+})^-1 at a+b=B
    Matrix Km;   // N- x N-
};

/// Per-state stationary (or epoch) law of the reflected process on a grid.
struct ReflectedLaw {
    Vector grid;
    Matrix survival;  // grid x N, P(W >= x | J = i)
    Matrix cdf;       // grid x N, P(W <= x | J = i)
    Matrix density;   // grid x N, absolutely continuous part
    Vector mass0;     // per state
    Vector massB;
};

/// Exit matrices from the strip (-b, a); requires kappa != 0 or q > 0.
CrossingMatrices crossing_matrices(const MmbmModel& model, double q,
                                   double a, double b);

/// kappa = 0, q = 0 variant: the exit system is rank deficient by one and
/// is closed with C(a 1 + h_+) + D(-b 1 + h_-) = h where Q h = -mu.
CrossingMatrices crossing_matrices_zero_drift(const MmbmModel& model,
                                              double a, double b);

/// Stationary law of the two-sided reflection of the given model. The
/// passage matrices of the time-reversed model are used internally.
ReflectedLaw stationary_law(const MmbmModel& model, double B, int grid_points = 201);
ReflectedLaw stationary_law(const MmbmModel& model, double B, const Vector& grid);

/// Joint law at an independent exponential epoch e_q started at a barrier:
/// entry (i, j) is P_i(W(e_q) >= x, J(e_q) = j). start_top selects x0 = B.
Matrix exp_epoch_law(const MmbmModel& model, double B, double q,
                     bool start_top, double x);

}  // namespace mmbm

#endif
