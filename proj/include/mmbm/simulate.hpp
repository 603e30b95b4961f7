#ifndef MMBM_SIMULATE_HPP
#define MMBM_SIMULATE_HPP

#include <cstdint>

#include "mmbm/reflection.hpp"

namespace mmbm {

struct SimConfig {
    double dt = 0.0;          // 0 -> auto scale from model and strip
    double horizon = 1000.0;  // model time
    int replications = 1;
    std::uint64_t seed = 1;
    int batches = 20;         // batch means for long-run estimators
};

/// Sampled path of the reflected system; the discrete Skorokhod identity
/// W = x0 + X + L - U holds at every sample exactly.
struct PathRecord {
    std::vector<double> times;
    std::vector<double> X;
    std::vector<int> J;
    std::vector<double> W;
    std::vector<double> L;
    std::vector<double> U;
};

/// Estimate with a standard error per entry.
struct MatrixEstimate {
    Matrix value;
    Matrix stderr_;
};

struct OverflowEstimate {
    Vector unused;          // per state in E-
    Vector unused_se;
    Vector overflow;        // per state in E+
    Vector overflow_se;
};

struct JumpProcessEstimate {
    double jump_rate = 0.0;       // per unit lower local time
    double jump_rate_se = 0.0;
    double size_rate = 0.0;       // 1 / mean overflow jump
    double size_rate_se = 0.0;
    std::size_t jump_count = 0;
};

double default_dt(const MmbmModel& model, double B);

/// Single path of the two-sided reflection. Phase switch epochs are exact
/// (exponential holding times); Gaussian Euler increments within holdings,
/// steps split at switch epochs.
PathRecord simulate_path(const MmbmModel& model, const StripSpec& strip,
                         int j0, const SimConfig& config);

/// Monte Carlo estimate of Pi e^{Lambda x} entries: P_i(tau_x < e_q, J = j),
/// one row per initial state, columns indexed by the direction's phases.
MatrixEstimate estimate_passage(const MmbmModel& model, double q, double x,
                                Direction dir, const SimConfig& config);

/// Long-run conditional CDF P(W <= x | J = j) at the given levels
/// (rows = levels, cols = states), batch-mean standard errors.
MatrixEstimate estimate_stationary(const MmbmModel& model, const StripSpec& strip,
                                   const Vector& levels, const SimConfig& config);

/// Long-run phase-split local time rates L(t)/t and U(t)/t.
OverflowEstimate estimate_overflow(const MmbmModel& model, const StripSpec& strip,
                                   const SimConfig& config);

/// Joint epoch law estimate: P_i(W(e_q) >= x, J(e_q) = j) from start at a barrier.
MatrixEstimate estimate_epoch(const MmbmModel& model, const StripSpec& strip,
                              double q, double x, const SimConfig& config);

/// Jump structure of U at inverse lower local times (overflow process).
JumpProcessEstimate estimate_overflow_jumps(const MmbmModel& model,
                                            const StripSpec& strip,
                                            const SimConfig& config);

}  // namespace mmbm

#endif
