#ifndef MMBM_LINALG_HPP
#define MMBM_LINALG_HPP

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace mmbm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

struct MmbmModel;

/// Root/vector pairs of the quadratic matrix polynomial
/// F(s) = 1/2 diag(sigma2) s^2 + diag(mu) s + (Q - q I).
struct SpectralData {
    std::vector<Complex> roots;
    std::vector<ComplexVector> vectors;   // unit norm, N components each
    std::vector<bool> semisimple;         // per-root cluster diagnostic
    int zero_root_index = -1;             // index of the (single) zero root, -1 if none
};

class LinalgError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Matrix exponential (scaling-and-squaring, Pade).
Matrix expm(const Matrix& a);

/// Invariant distribution of an irreducible conservative generator:
/// pi^T Q = 0, pi > 0, sum pi = 1. Throws on reducible or non-generator input.
Vector stationary_of_generator(const Matrix& q);

/// All roots of det F(s) = 0 with right null vectors, via companion
/// linearization of the deflated pencil (sigma = 0 states contribute
/// degree <= 1). Throws LinalgError on a defective spectrum.
///
/// allow_double_zero: accept the double zero root arising at q = 0,
/// kappa = 0 and report a single zero root (vector of ones); the second
/// copy is dropped. Used by the zero-drift reflection route only.
SpectralData quadratic_eigenpairs(const MmbmModel& model, double q,
                                  bool allow_double_zero = false);

/// Evaluate F(s) for diagnostics and residual checks.
ComplexMatrix quadratic_pencil(const MmbmModel& model, double q, Complex s);

/// Reciprocal condition estimate used for the V_- invertibility guard.
double condition_estimate(const Matrix& m);

/// Solve x A = b (row-vector convention) with a conditioning check.
Matrix solve_right(const Matrix& b, const Matrix& a);

}  // namespace mmbm

#endif
