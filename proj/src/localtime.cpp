#include "mmbm/localtime.hpp"

#include <cmath>

namespace mmbm {

namespace {

struct Pairs {
    PassagePair up, down;
    PhaseClasses cls;
    Matrix Pip_m, Pim_p;  // row restrictions of Pi+ to E-, Pi- to E+
    Matrix eu_B, ed_B;
    Matrix Kp, Km;
};

double spectral_radius(const Matrix& m) {
    if (m.rows() == 0) return 0.0;
    return Eigen::EigenSolver<Matrix>(m, false).eigenvalues().cwiseAbs().maxCoeff();
}

Matrix stable_inverse(const Matrix& m) {
    if (m.rows() == 0) return m;
    if (spectral_radius(m) >= 1.0 - 1e-12)
        throw LocalTimeError("local time: barrier cycle matrix is not transient");
    return (Matrix::Identity(m.rows(), m.cols()) - m).partialPivLu().inverse();
}

Pairs make_pairs(const MmbmModel& model, double B, double q) {
    if (q == 0 && std::abs(asymptotic_drift(model)) <= 1e-12)
        throw LocalTimeError("local time: the case q = 0 with kappa = 0 is excluded");
    Pairs ps;
    ps.cls = phase_classes(model);
    ps.up = passage_matrices(model, q, Direction::up);
    ps.down = passage_matrices(model, q, Direction::down);
    ps.Pip_m = restrict_rows(ps.up.Pi, ps.cls, -1);
    ps.Pim_p = restrict_rows(ps.down.Pi, ps.cls, +1);
    ps.eu_B = expm(B * ps.up.Lambda);
    ps.ed_B = expm(B * ps.down.Lambda);
    ps.Kp = stable_inverse(ps.Pim_p * ps.ed_B * ps.Pip_m * ps.eu_B);
    ps.Km = stable_inverse(ps.Pip_m * ps.eu_B * ps.Pim_p * ps.ed_B);
    return ps;
}

Matrix shifted_inverse(const Matrix& lambda, double shift) {
    const auto n = lambda.rows();
    return (lambda - shift * Matrix::Identity(n, n)).partialPivLu().inverse();
}

// [ML, MU] per the boundary system; x0-dependent right-hand blocks.
struct Blocks {
    Matrix ml, mu;
    Matrix rhs_l, rhs_u;
};

Blocks transforms_at(const Pairs& ps, double B, double x0, double alpha) {
    Blocks b;
    // (Lam- - a I)^-1 and (Lam+ + a I)^-1 are nonsingular by the Perron bound.
    b.rhs_l = ps.down.Pi * shifted_inverse(ps.down.Lambda, alpha) *
              expm(x0 * ps.down.Lambda);
    b.rhs_u = ps.up.Pi * shifted_inverse(ps.up.Lambda, -alpha) *
              expm((B - x0) * ps.up.Lambda);
    b.ml = (b.rhs_l + b.rhs_u * ps.Pim_p * ps.ed_B) * ps.Km;
    b.mu = (b.rhs_u + b.rhs_l * ps.Pip_m * ps.eu_B) * ps.Kp;
    return b;
}

}  // namespace

std::pair<double, double> admissible_alpha(const MmbmModel& model, double q) {
    const PassagePair up = passage_matrices(model, q, Direction::up);
    const PassagePair down = passage_matrices(model, q, Direction::down);
    return {down.rho, -up.rho};
}

LocalTimeTransform localtime_transform(const MmbmModel& model, double B,
                                       double x0, double q, double alpha) {
    if (B <= 0) throw LocalTimeError("localtime_transform: buffer size must be positive");
    if (x0 < 0 || x0 > B)
        throw LocalTimeError("localtime_transform: x0 must lie in [0, B]");
    const Pairs ps = make_pairs(model, B, q);
    const double lo = ps.down.rho;
    const double hi = -ps.up.rho;
    double span = 0.0;
    if (std::isfinite(lo)) span = std::max(span, std::abs(lo));
    if (std::isfinite(hi)) span = std::max(span, std::abs(hi));
    const double margin = 1e-8 * (1.0 + span);
    if (!(alpha > lo + margin && alpha < hi - margin))
        throw LocalTimeError(
            "localtime_transform: alpha outside the admissible interval (rho-, -rho+)");

    const Blocks at_x0 = transforms_at(ps, B, x0, alpha);
    const Blocks at_0 = transforms_at(ps, B, 0.0, alpha);
    const Blocks at_B = transforms_at(ps, B, B, alpha);

    LocalTimeTransform out;
    out.alpha = alpha;
    out.q = q;
    out.rho_minus = ps.down.rho;
    out.rho_plus = ps.up.rho;
    out.ML = at_x0.ml;
    out.MU = at_x0.mu;

    const Matrix fl_inv = restrict_rows(at_0.ml, ps.cls, -1);
    const Matrix fu_inv = restrict_rows(at_B.mu, ps.cls, +1);
    if (fl_inv.rows() > 0 && condition_estimate(fl_inv) > 1e12)
        throw LocalTimeError("localtime_transform: singular restriction of M^L");
    if (fu_inv.rows() > 0 && condition_estimate(fu_inv) > 1e12)
        throw LocalTimeError("localtime_transform: singular restriction of M^U");
    out.FL = fl_inv.partialPivLu().inverse();
    out.FU = fu_inv.partialPivLu().inverse();
    out.initL = out.ML * out.FL;
    out.initU = out.MU * out.FU;
    out.kL = perron_eigenvalue(out.FL);
    out.kU = perron_eigenvalue(out.FU);
    if (out.FL.rows() > 0 && out.kL >= 0)
        throw LocalTimeError("localtime_transform: k^L(alpha) must be negative");
    if (out.FU.rows() > 0 && out.kU >= 0)
        throw LocalTimeError("localtime_transform: k^U(alpha) must be negative");

    // Residual of the defining block system. One of the blocks is empty when
    // every phase moves the same way.
    const auto max_abs = [](const Matrix& m) {
        return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
    };
    const Matrix res_l = out.ML - out.MU * ps.Pim_p * ps.ed_B - at_x0.rhs_l;
    const Matrix res_u = out.MU - out.ML * ps.Pip_m * ps.eu_B - at_x0.rhs_u;
    const double scale = 1.0 + std::max(max_abs(out.ML), max_abs(out.MU));
    if (std::max(max_abs(res_l), max_abs(res_u)) > 1e-9 * scale)
        throw LocalTimeError("localtime_transform: block system residual too large");
    return out;
}

Matrix busy_period_transform(const MmbmModel& model, double B, double q,
                             double alpha) {
    const bool all_diffusive = model.sigma2.minCoeff() > 0;
    if (!all_diffusive)
        return localtime_transform(model, B, B, q, alpha).initL;
    const Pairs ps = make_pairs(model, B, q);
    const Matrix inv_m = shifted_inverse(ps.down.Lambda, alpha);  // (Lam- - aI)^-1
    const auto n = ps.down.Lambda.rows();
    const Matrix lam_m_shift = ps.down.Lambda - alpha * Matrix::Identity(n, n);
    const Matrix lam_p_shift = ps.up.Lambda + alpha * Matrix::Identity(n, n);
    const Matrix middle = expm(-B * ps.down.Lambda) * lam_p_shift +
                          lam_m_shift * expm(B * ps.up.Lambda);
    return inv_m * (ps.up.Lambda + ps.down.Lambda) *
           middle.partialPivLu().inverse() * lam_m_shift;
}

OverflowRates overflow_rates(const MmbmModel& model, double B) {
    if (B <= 0) throw LocalTimeError("overflow_rates: buffer size must be positive");
    const double kappa = asymptotic_drift(model);
    if (std::abs(kappa) <= 1e-12)
        throw LocalTimeError(
            "overflow_rates: kappa = 0 requires an additional closing equation "
            "and is not supported");
    const Pairs ps = make_pairs(model, B, 0.0);
    const int np = ps.cls.n_plus();
    const int nm = ps.cls.n_minus();

    Matrix g_sys(nm + np, nm + np);
    g_sys.topLeftCorner(nm, nm).setIdentity();
    g_sys.topRightCorner(nm, np) = -ps.Pip_m * ps.eu_B;
    g_sys.bottomLeftCorner(np, nm) = -ps.Pim_p * ps.ed_B;
    g_sys.bottomRightCorner(np, np).setIdentity();

    Vector rhs = Vector::Zero(nm + np);
    if (kappa > 0) {
        // Lambda+ is recurrent; pi+ its stationary distribution.
        Matrix lam = ps.up.Lambda;
        for (Eigen::Index i = 0; i < lam.rows(); ++i) lam(i, i) -= lam.row(i).sum();
        rhs.tail(np) = kappa * stationary_of_generator(lam);
    } else {
        Matrix lam = ps.down.Lambda;
        for (Eigen::Index i = 0; i < lam.rows(); ++i) lam(i, i) -= lam.row(i).sum();
        rhs.head(nm) = -kappa * stationary_of_generator(lam);
    }
    const Vector z = g_sys.transpose().partialPivLu().solve(rhs);

    OverflowRates out;
    out.unused = z.head(nm);
    out.overflow = z.tail(np);
    out.kappaL = out.unused.sum();
    out.kappaU = out.overflow.sum();
    out.piL = out.kappaL > 0 ? Vector(out.unused / out.kappaL)
                             : Vector(Vector::Zero(nm));
    out.piU = out.kappaU > 0 ? Vector(out.overflow / out.kappaU)
                             : Vector(Vector::Zero(np));
    return out;
}

std::pair<double, double> brownian_overflow_process(double mu, double B) {
    if (B <= 0) throw LocalTimeError("brownian_overflow_process: B must be positive");
    if (mu == 0) return {1.0 / B, 1.0 / B};
    return {2.0 * mu / (1.0 - std::exp(-2.0 * mu * B)),
            2.0 * mu / (std::exp(2.0 * mu * B) - 1.0)};
}

}  // namespace mmbm
