#include "mmbm/passage.hpp"

#include <cmath>
#include <limits>

namespace mmbm {

namespace {

PassagePair build_down(const MmbmModel& model, double q, bool allow_zero_drift) {
    const PhaseClasses cls = phase_classes(model);
    const int n = model.size();
    const int nm = cls.n_minus();

    const SpectralData spec = quadratic_eigenpairs(model, q, allow_zero_drift);
    const double kappa = q == 0 ? asymptotic_drift(model) : 0.0;

    std::vector<int> selected;
    for (std::size_t k = 0; k < spec.roots.size(); ++k) {
        const Complex s = spec.roots[k];
        if (static_cast<int>(k) == spec.zero_root_index) {
            // The zero root joins the down set when the lower barrier is
            // recurrent; at kappa = 0 (zero-drift route) it joins both sets.
            const bool zero_drift = std::abs(kappa) <= 1e-12;
            if (kappa < 0 || (zero_drift && allow_zero_drift))
                selected.push_back(static_cast<int>(k));
            continue;
        }
        if (s.real() <= -1e-9 * (1.0 + std::abs(s)))
            selected.push_back(static_cast<int>(k));
        else if (s.real() < 1e-9 * (1.0 + std::abs(s)))
            throw PassageError("passage_matrices: ambiguous root sign; perturb q");
    }
    if (static_cast<int>(selected.size()) != nm)
        throw PassageError("passage_matrices: root count does not match phase count");
    if (nm == 0) {
        // No phase can move down: the passage law is void.
        PassagePair pair;
        pair.direction = Direction::down;
        pair.q = q;
        pair.Pi = Matrix::Zero(n, 0);
        pair.Lambda = Matrix::Zero(0, 0);
        pair.rho = -std::numeric_limits<double>::infinity();
        return pair;
    }

    ComplexMatrix v(n, nm);
    ComplexMatrix vm(nm, nm);
    ComplexMatrix gamma = ComplexMatrix::Zero(nm, nm);
    for (int c = 0; c < nm; ++c) {
        v.col(c) = spec.vectors[static_cast<std::size_t>(selected[c])];
        gamma(c, c) = spec.roots[static_cast<std::size_t>(selected[c])];
        for (int r = 0; r < nm; ++r) vm(r, c) = v(cls.e_minus[static_cast<std::size_t>(r)], c);
    }
    {
        Eigen::JacobiSVD<ComplexMatrix> svd(vm);
        const double smin = svd.singularValues().minCoeff();
        if (smin == 0 || svd.singularValues().maxCoeff() / smin > 1e12)
            throw PassageError(
                "passage_matrices: eigenvector restriction is ill-conditioned; "
                "perturb q or parameters");
    }
    const ComplexMatrix vm_inv = vm.partialPivLu().inverse();
    const ComplexMatrix lam_c = vm * gamma * vm_inv;
    const ComplexMatrix pi_c = v * vm_inv;
    if (lam_c.imag().cwiseAbs().maxCoeff() > 1e-10 * (1.0 + lam_c.cwiseAbs().maxCoeff()) ||
        pi_c.imag().cwiseAbs().maxCoeff() > 1e-10)
        throw PassageError("passage_matrices: imaginary residue after conjugate pairing");

    PassagePair pair;
    pair.direction = Direction::down;
    pair.q = q;
    pair.Lambda = lam_c.real();
    pair.Pi = pi_c.real();
    pair.rho = perron_eigenvalue(pair.Lambda);
    return pair;
}

}  // namespace

PassagePair passage_matrices(const MmbmModel& model, double q, Direction dir,
                             bool allow_zero_drift) {
    if (q < 0) throw PassageError("passage_matrices: killing rate must be >= 0");
    if (q == 0 && !allow_zero_drift && std::abs(asymptotic_drift(model)) < 1e-14)
        throw PassageError(
            "passage_matrices: q = 0 with kappa = 0 is excluded; use the "
            "zero-drift reflection route");
    PassagePair pair = dir == Direction::down
                           ? build_down(model, q, allow_zero_drift)
                           : build_down(flip(model), q, allow_zero_drift);
    pair.direction = dir;
    const double res = passage_residual(model, q, pair);
    if (res > 1e-8)
        throw PassageError("passage_matrices: quadratic-equation residual too large");
    return pair;
}

Matrix crossing_probability(const PassagePair& pair, double x) {
    if (x < 0) throw PassageError("crossing_probability: level must be >= 0");
    if (pair.Lambda.rows() == 0) return pair.Pi;
    return pair.Pi * expm(x * pair.Lambda);
}

double perron_eigenvalue(const Matrix& lambda) {
    if (lambda.rows() == 0) return -std::numeric_limits<double>::infinity();
    Eigen::EigenSolver<Matrix> solver(lambda);
    int best = 0;
    for (int k = 1; k < lambda.rows(); ++k)
        if (solver.eigenvalues()(k).real() > solver.eigenvalues()(best).real())
            best = k;
    return solver.eigenvalues()(best).real();
}

double passage_residual(const MmbmModel& model, double q, const PassagePair& pair) {
    const int n = model.size();
    if (pair.Pi.cols() == 0) return 0.0;
    const double drift_sign = pair.direction == Direction::down ? 1.0 : -1.0;
    const Matrix res = 0.5 * model.sigma2.asDiagonal() * pair.Pi * pair.Lambda * pair.Lambda +
                       drift_sign * model.mu.asDiagonal() * pair.Pi * pair.Lambda +
                       (model.Q - q * Matrix::Identity(n, n)) * pair.Pi;
    return res.cwiseAbs().maxCoeff();
}

}  // namespace mmbm
