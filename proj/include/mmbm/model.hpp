#ifndef MMBM_MODEL_HPP
#define MMBM_MODEL_HPP

#include <string>
#include <vector>

#include "mmbm/linalg.hpp"

namespace mmbm {

class ModelError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Phase classification: E+ holds states whose free motion can go up,
/// E- those that can go down. A state with sigma2 = 0 and mu = 0 belongs
/// to neither.
struct PhaseClasses {
    std::vector<int> e_plus;
    std::vector<int> e_minus;
    int n_plus() const { return static_cast<int>(e_plus.size()); }
    int n_minus() const { return static_cast<int>(e_minus.size()); }
};

/// Markov-modulated Brownian motion: background generator Q, per-state
/// drift mu and variance sigma2.
struct MmbmModel {
    Matrix Q;
    Vector mu;
    Vector sigma2;
    std::vector<std::string> state_labels;

    int size() const { return static_cast<int>(mu.size()); }
};

/// Validates generator structure (irreducible, off-diagonals >= 0, zero
/// row sums within 1e-12*||Q||; diagonals repaired within tolerance) and
/// returns the phase classes. Throws ModelError otherwise.
PhaseClasses validate(MmbmModel& model);

/// Phase classes without mutating the model; model must already be valid.
PhaseClasses phase_classes(const MmbmModel& model);

/// Asymptotic drift kappa = sum_i pi_i mu_i.
double asymptotic_drift(const MmbmModel& model);

/// Time-reversed model: generator diag(pi)^-1 Q^T diag(pi), same mu, sigma2.
MmbmModel time_reverse(const MmbmModel& model);

/// Sign-flipped model (mu -> -mu); swaps the roles of the two barriers.
MmbmModel flip(const MmbmModel& model);

/// Restriction M_+/- : keep rows indexed by E+ (sign > 0) or E- in state order.
Matrix restrict_rows(const Matrix& m, const PhaseClasses& cls, int sign);

bool is_degenerate(const PhaseClasses& cls, int n);

}  // namespace mmbm

#endif
