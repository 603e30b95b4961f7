#include "mmbm/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "mmbm/model.hpp"

namespace mmbm {

namespace {

void check_finite(const Matrix& a, const char* what) {
    if (!a.allFinite()) throw LinalgError(std::string(what) + ": non-finite entries");
}

}  // namespace

Matrix expm(const Matrix& a) {
    if (a.rows() != a.cols()) throw LinalgError("expm: matrix must be square");
    check_finite(a, "expm");
    if (a.norm() > 1e8) throw LinalgError("expm: norm too large, result would overflow");
    Matrix result = a.exp();
    if (!result.allFinite()) throw LinalgError("expm: overflow in evaluation");
    return result;
}

Vector stationary_of_generator(const Matrix& q) {
    const auto n = q.rows();
    if (n != q.cols()) throw LinalgError("stationary_of_generator: non-square input");
    check_finite(q, "stationary_of_generator");
    const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && q(i, j) < -1e-12 * scale)
                throw LinalgError("stationary_of_generator: negative off-diagonal rate");
        if (std::abs(q.row(i).sum()) > 1e-10 * scale)
            throw LinalgError("stationary_of_generator: row sums must vanish");
    }
    // Reachability check: the directed graph of positive rates must be
    // strongly connected.
    auto reachable = [&](bool transpose) {
        std::vector<bool> seen(static_cast<std::size_t>(n), false);
        std::vector<Eigen::Index> stack{0};
        seen[0] = true;
        while (!stack.empty()) {
            const auto i = stack.back();
            stack.pop_back();
            for (Eigen::Index j = 0; j < n; ++j) {
                const double rate = transpose ? q(j, i) : q(i, j);
                if (i != j && rate > 0 && !seen[static_cast<std::size_t>(j)]) {
                    seen[static_cast<std::size_t>(j)] = true;
                    stack.push_back(j);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
    };
    if (n > 1 && (!reachable(false) || !reachable(true)))
        throw LinalgError("stationary_of_generator: generator is reducible");
    if (n == 1) return Vector::Ones(1);

    // pi^T Q = 0 with sum pi = 1: replace the last balance equation by the
    // normalization and solve Q^T (with column n-1 -> ones) directly.
    Matrix sys = q.transpose();
    sys.row(n - 1).setOnes();
    Vector rhs = Vector::Zero(n);
    rhs(n - 1) = 1.0;
    Vector pi = sys.colPivHouseholderQr().solve(rhs);
    if (pi.minCoeff() <= 0)
        throw LinalgError("stationary_of_generator: non-positive stationary vector");
    return pi / pi.sum();
}

ComplexMatrix quadratic_pencil(const MmbmModel& model, double q, Complex s) {
    const int n = model.size();
    ComplexMatrix f = (model.Q - q * Matrix::Identity(n, n)).cast<Complex>();
    for (int i = 0; i < n; ++i)
        f(i, i) += 0.5 * model.sigma2(i) * s * s + model.mu(i) * s;
    return f;
}

namespace {

int expected_degree(const MmbmModel& model) {
    int deg = 0;
    for (int i = 0; i < model.size(); ++i) {
        if (model.sigma2(i) > 0)
            deg += 2;
        else if (model.mu(i) != 0)
            deg += 1;
    }
    return deg;
}

}  // namespace

SpectralData quadratic_eigenpairs(const MmbmModel& model, double q,
                                  bool allow_double_zero) {
    if (q < 0) throw LinalgError("quadratic_eigenpairs: killing rate must be >= 0");
    const int n = model.size();
    const int deg = expected_degree(model);
    if (deg == 0) throw LinalgError("quadratic_eigenpairs: degenerate constant model");

    // Deflated companion pencil A w = s E w with w = [v; s v_D], where D is
    // the set of diffusive states. Rows: the N pencil equations plus the
    // |D| definitions w_D = s v_D.
    std::vector<int> diff;
    for (int i = 0; i < n; ++i)
        if (model.sigma2(i) > 0) diff.push_back(i);
    const int nd = static_cast<int>(diff.size());
    const int m = n + nd;

    Matrix A = Matrix::Zero(m, m);
    Matrix E = Matrix::Zero(m, m);
    A.topLeftCorner(n, n) = model.Q - q * Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i) E(i, i) = -model.mu(i);
    for (int k = 0; k < nd; ++k) {
        E(diff[k], n + k) = -0.5 * model.sigma2(diff[k]);
        A(n + k, n + k) = 1.0;       // w_D
        E(n + k, diff[k]) = 1.0;     // = s v_D
    }

    Eigen::GeneralizedEigenSolver<Matrix> solver;
    solver.compute(A, E, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success)
        throw LinalgError("quadratic_eigenpairs: QZ iteration failed");

    const double pencil_scale = std::max(A.cwiseAbs().maxCoeff(), E.cwiseAbs().maxCoeff());
    SpectralData out;
    for (int k = 0; k < m; ++k) {
        const Complex alpha = solver.alphas()(k);
        const double beta = solver.betas()(k);
        if (std::abs(beta) <= 1e-12 * std::abs(alpha)) continue;  // deflated infinity
        Complex s = alpha / beta;
        ComplexVector v = solver.eigenvectors().col(k).head(n);
        const double vn = v.norm();
        if (vn == 0) throw LinalgError("quadratic_eigenpairs: zero eigenvector");
        v /= vn;
        out.roots.push_back(s);
        out.vectors.push_back(v);
    }
    if (static_cast<int>(out.roots.size()) != deg)
        throw LinalgError("quadratic_eigenpairs: root count does not match pencil degree");

    // Zero-root handling. A clean semisimple zero root is computed to
    // machine precision; a double zero (kappa = 0) splits as O(sqrt(eps)),
    // so the candidate radius at q = 0 must be much wider than the sign
    // tolerance. At q > 0 the pencil has no zero root, but it may have a
    // genuinely tiny one (magnitude ~ q / kappa), so only a true numerical
    // zero is rejected there.
    const double zero_radius = q == 0 ? 1e-6 : 1e-13 * pencil_scale;
    std::vector<int> zeros;
    for (std::size_t k = 0; k < out.roots.size(); ++k)
        if (std::abs(out.roots[k]) <= zero_radius) zeros.push_back(static_cast<int>(k));
    if (q == 0) {
        if (zeros.size() == 2 && allow_double_zero) {
            // Double root at kappa = 0; keep a single exact copy.
            out.roots.erase(out.roots.begin() + zeros[1]);
            out.vectors.erase(out.vectors.begin() + zeros[1]);
            zeros.pop_back();
        }
        if (zeros.size() != 1)
            throw LinalgError(
                "quadratic_eigenpairs: defective spectrum at q=0 "
                "(kappa = 0 double root); perturb q or parameters");
        out.roots[static_cast<std::size_t>(zeros[0])] = Complex(0, 0);
        out.vectors[static_cast<std::size_t>(zeros[0])] =
            ComplexVector::Ones(n) / std::sqrt(static_cast<double>(n));
        out.zero_root_index = zeros[0];
    } else if (!zeros.empty()) {
        throw LinalgError("quadratic_eigenpairs: unexpected zero root at q > 0");
    }

    // Residual check and defectiveness detection by root clustering.
    for (std::size_t k = 0; k < out.roots.size(); ++k) {
        const ComplexMatrix f = quadratic_pencil(model, q, out.roots[k]);
        const double fnorm = f.cwiseAbs().maxCoeff();
        const double res = (f * out.vectors[k]).cwiseAbs().maxCoeff();
        if (res > 1e-10 * std::max(1.0, fnorm) * std::max(1.0, pencil_scale))
            throw LinalgError("quadratic_eigenpairs: eigenpair residual too large");
    }
    const std::size_t nr = out.roots.size();
    out.semisimple.assign(nr, true);
    for (std::size_t i = 0; i < nr; ++i) {
        for (std::size_t j = i + 1; j < nr; ++j) {
            if (std::abs(out.roots[i] - out.roots[j]) >
                1e-6 * (1.0 + std::abs(out.roots[i])))
                continue;
            // Clustered roots: vectors must stay linearly independent.
            ComplexMatrix pair(n, 2);
            pair.col(0) = out.vectors[i];
            pair.col(1) = out.vectors[j];
            Eigen::JacobiSVD<ComplexMatrix> svd(pair);
            if (svd.singularValues()(1) < 1e-8) {
                out.semisimple[i] = out.semisimple[j] = false;
                throw LinalgError(
                    "quadratic_eigenpairs: defective spectrum; perturb q or parameters");
            }
        }
    }
    return out;
}

double condition_estimate(const Matrix& m) {
    if (m.size() == 0) return 1.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    const double smin = svd.singularValues().minCoeff();
    if (smin == 0) return std::numeric_limits<double>::infinity();
    return svd.singularValues().maxCoeff() / smin;
}

Matrix solve_right(const Matrix& b, const Matrix& a) {
    if (a.rows() == 0) return Matrix(b.rows(), 0);
    if (condition_estimate(a) > 1e12)
        throw LinalgError("solve_right: matrix is ill-conditioned; perturb parameters");
    // x a = b  <=>  a^T x^T = b^T
    return a.transpose().colPivHouseholderQr().solve(b.transpose()).transpose();
}

}  // namespace mmbm
