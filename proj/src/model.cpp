#include "mmbm/model.hpp"

#include <algorithm>
#include <cmath>

namespace mmbm {

namespace {

void check_structure(const MmbmModel& model) {
    const int n = model.size();
    if (n < 1) throw ModelError("model: at least one state required");
    if (model.Q.rows() != n || model.Q.cols() != n)
        throw ModelError("model: generator dimension mismatch");
    if (model.sigma2.size() != n) throw ModelError("model: sigma2 dimension mismatch");
    if (!model.Q.allFinite() || !model.mu.allFinite() || !model.sigma2.allFinite())
        throw ModelError("model: non-finite parameters");
    if (model.sigma2.minCoeff() < 0) throw ModelError("model: negative variance");
    if (!model.state_labels.empty() &&
        static_cast<int>(model.state_labels.size()) != n)
        throw ModelError("model: label count mismatch");
}

}  // namespace

PhaseClasses phase_classes(const MmbmModel& model) {
    PhaseClasses cls;
    for (int i = 0; i < model.size(); ++i) {
        const bool diffusive = model.sigma2(i) > 0;
        if (diffusive || model.mu(i) > 0) cls.e_plus.push_back(i);
        if (diffusive || model.mu(i) < 0) cls.e_minus.push_back(i);
    }
    return cls;
}

bool is_degenerate(const PhaseClasses& cls, int n) {
    (void)n;
    return cls.e_plus.empty() && cls.e_minus.empty();
}

PhaseClasses validate(MmbmModel& model) {
    check_structure(model);
    const int n = model.size();
    const double scale = std::max(1.0, model.Q.cwiseAbs().maxCoeff());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            if (i != j && model.Q(i, j) < 0) {
                if (model.Q(i, j) > -1e-12 * scale)
                    model.Q(i, j) = 0;
                else
                    throw ModelError("model: negative off-diagonal rate in Q");
            }
        const double rs = model.Q.row(i).sum();
        if (std::abs(rs) > 1e-12 * scale)
            throw ModelError("model: generator row sum exceeds tolerance");
        model.Q(i, i) -= rs;  // repair JSON round-trip noise
    }
    if (n > 1) {
        try {
            stationary_of_generator(model.Q);
        } catch (const LinalgError& e) {
            throw ModelError(std::string("model: ") + e.what());
        }
    }
    return phase_classes(model);
}

double asymptotic_drift(const MmbmModel& model) {
    return stationary_of_generator(model.Q).dot(model.mu);
}

MmbmModel time_reverse(const MmbmModel& model) {
    const Vector pi = stationary_of_generator(model.Q);
    MmbmModel rev = model;
    rev.Q = pi.cwiseInverse().asDiagonal() * model.Q.transpose() * pi.asDiagonal();
    return rev;
}

MmbmModel flip(const MmbmModel& model) {
    MmbmModel f = model;
    f.mu = -model.mu;
    return f;
}

Matrix restrict_rows(const Matrix& m, const PhaseClasses& cls, int sign) {
    const auto& idx = sign > 0 ? cls.e_plus : cls.e_minus;
    for (int i : idx)
        if (i >= m.rows()) throw ModelError("restrict_rows: dimension mismatch");
    Matrix out(static_cast<Eigen::Index>(idx.size()), m.cols());
    for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = m.row(idx[k]);
    return out;
}

}  // namespace mmbm
