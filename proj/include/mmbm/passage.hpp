#ifndef MMBM_PASSAGE_HPP
#define MMBM_PASSAGE_HPP

#include "mmbm/model.hpp"

namespace mmbm {

enum class Direction { up, down };

/// First-passage pair (Pi, Lambda) for one direction under killing rate q:
/// P(J(tau_x) in .) = Pi e^{Lambda x}. Pi is N x Nd, Lambda is Nd x Nd
/// where Nd is the phase count of the direction. rho is the Perron
/// eigenvalue of Lambda (<= 0).
struct PassagePair {
    Direction direction;
    double q = 0.0;
    Matrix Pi;
    Matrix Lambda;
    double rho = 0.0;
};

class PassageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Builds the passage pair from the spectral data of the quadratic pencil.
/// Down direction: roots with Re s < 0 plus the zero root (vector of ones)
/// when q = 0 and kappa < 0. Up direction: same construction on the
/// sign-flipped model. Throws PassageError at q = 0, kappa = 0 unless
/// allow_zero_drift is set (zero-drift reflection route: the zero root
/// joins both direction sets).
PassagePair passage_matrices(const MmbmModel& model, double q, Direction dir,
                             bool allow_zero_drift = false);

/// P(J(tau_x)) = Pi e^{Lambda x}, x >= 0.
Matrix crossing_probability(const PassagePair& pair, double x);

/// Real rightmost eigenvalue of a passage generator or MAP exponent.
double perron_eigenvalue(const Matrix& lambda);

/// Residual of 1/2 diag(sigma2) Pi Lambda^2 -/+ diag(mu) Pi Lambda
/// + (Q - qI) Pi (sign per direction); used by validation and tests.
double passage_residual(const MmbmModel& model, double q, const PassagePair& pair);

}  // namespace mmbm

#endif
