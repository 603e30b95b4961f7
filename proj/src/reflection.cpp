#include "mmbm/reflection.hpp"

#include <cmath>

namespace mmbm {

namespace {

constexpr double kZeroDriftTol = 1e-12;

struct PairSet {
    PassagePair up;
    PassagePair down;
    PhaseClasses cls;
    Matrix Pip_m;  // rows E- of Pi+
    Matrix Pim_p;  // rows E+ of Pi-
};

PairSet make_pairs(const MmbmModel& model, double q, bool allow_zero_drift = false) {
    PairSet ps;
    ps.cls = phase_classes(model);
    ps.up = passage_matrices(model, q, Direction::up, allow_zero_drift);
    ps.down = passage_matrices(model, q, Direction::down, allow_zero_drift);
    ps.Pip_m = restrict_rows(ps.up.Pi, ps.cls, -1);
    ps.Pim_p = restrict_rows(ps.down.Pi, ps.cls, +1);
    return ps;
}

double spectral_radius(const Matrix& m) {
    if (m.rows() == 0) return 0.0;
    return Eigen::EigenSolver<Matrix>(m, false).eigenvalues().cwiseAbs().maxCoeff();
}

// (I - M)^{-1} after the transience check on the product matrix.
Matrix stable_inverse(const Matrix& m) {
    if (m.rows() == 0) return m;
    if (spectral_radius(m) >= 1.0 - 1e-12)
        throw ReflectionError(
            "crossing matrices: cycle product is not transient (kappa = 0?)");
    return (Matrix::Identity(m.rows(), m.cols()) - m).partialPivLu().inverse();
}

}  // namespace

CrossingMatrices crossing_matrices(const MmbmModel& model, double q,
                                   double a, double b) {
    if (a < 0 || b < 0 || a + b <= 0)
        throw ReflectionError("crossing_matrices: need a, b >= 0 with a + b > 0");
    if (q == 0 && std::abs(asymptotic_drift(model)) <= kZeroDriftTol)
        throw ReflectionError(
            "crossing_matrices: kappa = 0 at q = 0; use crossing_matrices_zero_drift");
    const PairSet ps = make_pairs(model, q);

    const Matrix eu_ab = expm((a + b) * ps.up.Lambda);
    const Matrix ed_ab = expm((a + b) * ps.down.Lambda);
    const Matrix eu_a = expm(a * ps.up.Lambda);
    const Matrix ed_b = expm(b * ps.down.Lambda);

    CrossingMatrices out;
    out.a = a;
    out.b = b;
    out.Kp = stable_inverse(ps.Pim_p * ed_ab * ps.Pip_m * eu_ab);
    out.Km = stable_inverse(ps.Pip_m * eu_ab * ps.Pim_p * ed_ab);
    out.C = (ps.up.Pi * eu_a - ps.down.Pi * ed_b * ps.Pip_m * eu_ab) * out.Kp;
    out.D = (ps.down.Pi * ed_b - ps.up.Pi * eu_a * ps.Pim_p * ed_ab) * out.Km;
    return out;
}

CrossingMatrices crossing_matrices_zero_drift(const MmbmModel& model,
                                              double a, double b) {
    if (a < 0 || b < 0 || a + b <= 0)
        throw ReflectionError("crossing_matrices: need a, b >= 0 with a + b > 0");
    if (std::abs(asymptotic_drift(model)) > kZeroDriftTol)
        throw ReflectionError("crossing_matrices_zero_drift: kappa must be 0");
    const PairSet ps = make_pairs(model, 0.0, /*allow_zero_drift=*/true);
    const int n = model.size();
    const int np = ps.cls.n_plus();
    const int nm = ps.cls.n_minus();

    const Matrix eu_ab = expm((a + b) * ps.up.Lambda);
    const Matrix ed_ab = expm((a + b) * ps.down.Lambda);

    // Row system [C_i, D_i] G = [Pi+ e^{a Lam+}, Pi- e^{b Lam-}]_i is rank
    // deficient by one; the closing equation uses h with Q h = -mu.
    Matrix g_sys(np + nm, np + nm);
    g_sys.topLeftCorner(np, np).setIdentity();
    g_sys.topRightCorner(np, nm) = ps.Pim_p * ed_ab;
    g_sys.bottomLeftCorner(nm, np) = ps.Pip_m * eu_ab;
    g_sys.bottomRightCorner(nm, nm).setIdentity();

    const Vector h = model.Q.completeOrthogonalDecomposition().solve(-model.mu);
    Vector closing(np + nm);
    for (int k = 0; k < np; ++k) closing(k) = a + h(ps.cls.e_plus[static_cast<std::size_t>(k)]);
    for (int k = 0; k < nm; ++k) closing(np + k) = -b + h(ps.cls.e_minus[static_cast<std::size_t>(k)]);

    Matrix rhs(n, np + nm);
    rhs.leftCols(np) = ps.up.Pi * expm(a * ps.up.Lambda);
    rhs.rightCols(nm) = ps.down.Pi * expm(b * ps.down.Lambda);

    // Stack the closing equation and solve the (overdetermined, consistent)
    // system for all rows at once.
    Matrix sys(np + nm + 1, np + nm);
    sys.topRows(np + nm) = g_sys.transpose();
    sys.bottomRows(1) = closing.transpose();
    Matrix stacked_rhs(np + nm + 1, n);
    stacked_rhs.topRows(np + nm) = rhs.transpose();
    stacked_rhs.bottomRows(1) = h.transpose();
    const Matrix z = sys.colPivHouseholderQr().solve(stacked_rhs).transpose();

    const double resid = (sys * z.transpose() - stacked_rhs).cwiseAbs().maxCoeff();
    if (resid > 1e-8)
        throw ReflectionError("crossing_matrices_zero_drift: augmented system residual too large");

    CrossingMatrices out;
    out.a = a;
    out.b = b;
    out.C = z.leftCols(np);
    out.D = z.rightCols(nm);
    return out;
}

namespace {

struct StationaryEngine {
    PairSet ps;          // pairs of the time-reversed model
    Matrix Kp, Km;
    Matrix eu_B, ed_B;
    bool zero_drift = false;
    MmbmModel rev;
    double B = 0.0;

    Vector survival(double x) const {
        if (zero_drift) {
            if (x <= 0) return Vector::Ones(rev.size());
            const auto cm = crossing_matrices_zero_drift(rev, x, B - x);
            return cm.C * Vector::Ones(cm.C.cols());
        }
        if (x <= 0) return Vector::Ones(rev.size());
        const Matrix eu_x = expm(x * ps.up.Lambda);
        const Matrix ed_bx = expm((B - x) * ps.down.Lambda);
        return (ps.up.Pi * eu_x - ps.down.Pi * ed_bx * ps.Pip_m * eu_B) * Kp *
               Vector::Ones(Kp.cols());
    }

    Vector cdf(double x) const {
        if (zero_drift) {
            if (x >= B) return Vector::Ones(rev.size());
            if (x <= 0) {
                const auto cm = crossing_matrices_zero_drift(rev, 0.0, B);
                return cm.D * Vector::Ones(cm.D.cols());
            }
            return crossing_matrices_zero_drift(rev, x, B - x).D *
                   Vector::Ones(ps.down.Pi.cols());
        }
        if (x >= B) return Vector::Ones(rev.size());
        const Matrix eu_x = expm(x * ps.up.Lambda);
        const Matrix ed_bx = expm((B - x) * ps.down.Lambda);
        return (ps.down.Pi * ed_bx - ps.up.Pi * eu_x * ps.Pim_p * ed_B) * Km *
               Vector::Ones(Km.cols());
    }

    Vector density(double x) const {
        if (zero_drift) {
            // No closed derivative through the augmented solve; centered
            // differences of the survival function.
            const double step = 1e-5 * B;
            const double lo = std::max(1e-9 * B, x - step);
            const double hi = std::min(B, x + step);
            return (survival(lo) - survival(hi)) / (hi - lo);
        }
        const Matrix eu_x = expm(x * ps.up.Lambda);
        const Matrix ed_bx = expm((B - x) * ps.down.Lambda);
        return -(ps.up.Pi * eu_x * ps.up.Lambda +
                 ps.down.Pi * ed_bx * ps.down.Lambda * ps.Pip_m * eu_B) *
               Kp * Vector::Ones(Kp.cols());
    }
};

StationaryEngine make_engine(const MmbmModel& model, double B) {
    if (B <= 0) throw ReflectionError("stationary_law: buffer size must be positive");
    StationaryEngine eng;
    eng.B = B;
    eng.rev = time_reverse(model);
    eng.zero_drift = std::abs(asymptotic_drift(model)) <= kZeroDriftTol;
    eng.ps = make_pairs(eng.rev, 0.0, eng.zero_drift);
    if (!eng.zero_drift) {
        eng.eu_B = expm(B * eng.ps.up.Lambda);
        eng.ed_B = expm(B * eng.ps.down.Lambda);
        eng.Kp = stable_inverse(eng.ps.Pim_p * eng.ed_B * eng.ps.Pip_m * eng.eu_B);
        eng.Km = stable_inverse(eng.ps.Pip_m * eng.eu_B * eng.ps.Pim_p * eng.ed_B);
    }
    return eng;
}

}  // namespace

ReflectedLaw stationary_law(const MmbmModel& model, double B, const Vector& grid) {
    const StationaryEngine eng = make_engine(model, B);
    const int n = model.size();
    ReflectedLaw law;
    law.grid = grid;
    law.survival.resize(grid.size(), n);
    law.cdf.resize(grid.size(), n);
    law.density.resize(grid.size(), n);
    for (Eigen::Index k = 0; k < grid.size(); ++k) {
        const double x = grid(k);
        if (x < 0 || x > B) throw ReflectionError("stationary_law: level outside [0, B]");
        law.survival.row(k) = eng.survival(x).transpose();
        law.cdf.row(k) = eng.cdf(x).transpose();
        law.density.row(k) = eng.density(std::min(std::max(x, 1e-9 * B), B - 1e-9 * B)).transpose();
    }
    if (eng.zero_drift) {
        law.mass0 = eng.cdf(0.0);
        law.massB = eng.survival(B);
    } else {
        law.mass0 = (eng.ps.down.Pi - eng.ps.up.Pi * eng.ps.Pim_p) * eng.ed_B * eng.Km *
                    Vector::Ones(eng.Km.cols());
        law.massB = (eng.ps.up.Pi - eng.ps.down.Pi * eng.ps.Pip_m) * eng.eu_B * eng.Kp *
                    Vector::Ones(eng.Kp.cols());
    }
    return law;
}

ReflectedLaw stationary_law(const MmbmModel& model, double B, int grid_points) {
    if (grid_points < 2) throw ReflectionError("stationary_law: need at least 2 grid points");
    return stationary_law(model, B, Vector::LinSpaced(grid_points, 0.0, B));
}

namespace {

// P_i(W(e_q) >= x, J(e_q) = j) for x0 = 0; valid for x in [0, B] with the
// x = 0 value understood as the limit P(W > 0).
Matrix epoch_from_bottom(const MmbmModel& model, double B, double q, double x) {
    const MmbmModel rev = time_reverse(model);
    const PairSet ps = make_pairs(rev, q);
    const Matrix eu_B = expm(B * ps.up.Lambda);
    const Matrix Kp = stable_inverse(ps.Pim_p * expm(B * ps.down.Lambda) * ps.Pip_m * eu_B);
    const Vector pi = stationary_of_generator(model.Q);
    const int n = model.size();
    const Matrix resolvent =
        (q * Matrix::Identity(n, n) - rev.Q).partialPivLu().inverse();
    const Matrix core = ps.up.Pi * expm(x * ps.up.Lambda) -
                        ps.down.Pi * expm((B - x) * ps.down.Lambda) * ps.Pip_m * eu_B;
    // The upward passage lands in an up-moving phase; the chain continues to
    // e_q from there, so only the E+ rows of the resolvent enter.
    const Matrix res_p = restrict_rows(resolvent, ps.cls, +1);
    const Matrix transposed = q * pi.asDiagonal() * core * Kp * res_p *
                              pi.cwiseInverse().asDiagonal();
    return transposed.transpose();
}

}  // namespace

Matrix exp_epoch_law(const MmbmModel& model, double B, double q,
                     bool start_top, double x) {
    if (q <= 0) throw ReflectionError("exp_epoch_law: killing rate must be positive");
    if (B <= 0) throw ReflectionError("exp_epoch_law: buffer size must be positive");
    if (x <= 0 || x > B) throw ReflectionError("exp_epoch_law: level must lie in (0, B]");
    if (!start_top) return epoch_from_bottom(model, B, q, x);
    // Start at the top barrier: reflect the sign, W = B - W~ with W~ the
    // reflection of the flipped model started at 0.
    const MmbmModel flipped = flip(model);
    const int n = model.size();
    const Matrix p_eq =
        (q * (q * Matrix::Identity(n, n) - model.Q).partialPivLu().inverse());
    return p_eq - epoch_from_bottom(flipped, B, q, B - x);
}

}  // namespace mmbm
