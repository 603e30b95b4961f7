#include "mmbm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mmbm {

namespace {

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t replication) {
    std::seed_seq seq{seed, replication, std::uint64_t{0x9e3779b97f4a7c15ULL}};
    return std::mt19937_64(seq);
}

class Stepper {
  public:
    Stepper(const MmbmModel& model, int j0, std::mt19937_64& rng, double dt)
        : model_(model), rng_(rng), dt_(dt), j_(j0) {
        draw_holding();
    }

    // One Euler sub-step, split exactly at the phase switch epoch.
    // Returns (phase active during the step, dX, h).
    struct Step {
        int j;
        double dx;
        double h;
    };

    Step next() {
        const double h = std::min(dt_, t_switch_ - t_);
        Step s;
        s.j = j_;
        s.h = h;
        const double mu = model_.mu(j_);
        const double sd = std::sqrt(model_.sigma2(j_) * h);
        s.dx = mu * h + (sd > 0 ? sd * normal_(rng_) : 0.0);
        t_ += h;
        if (t_ >= t_switch_) switch_phase();
        return s;
    }

    double time() const { return t_; }
    int phase() const { return j_; }

  private:
    void draw_holding() {
        const double rate = -model_.Q(j_, j_);
        if (rate <= 0) {
            t_switch_ = std::numeric_limits<double>::infinity();
            return;
        }
        std::exponential_distribution<double> exp_dist(rate);
        t_switch_ = t_ + exp_dist(rng_);
    }

    void switch_phase() {
        const double rate = -model_.Q(j_, j_);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double u = unif(rng_) * rate;
        int next = j_;
        for (int k = 0; k < model_.size(); ++k) {
            if (k == j_) continue;
            u -= model_.Q(j_, k);
            if (u <= 0) {
                next = k;
                break;
            }
        }
        j_ = next;
        draw_holding();
    }

    const MmbmModel& model_;
    std::mt19937_64& rng_;
    double dt_;
    int j_;
    double t_ = 0.0;
    double t_switch_ = 0.0;
    std::normal_distribution<double> normal_;
};

int column_of(const std::vector<int>& phases, int state) {
    for (std::size_t k = 0; k < phases.size(); ++k)
        if (phases[k] == state) return static_cast<int>(k);
    return -1;
}

double resolve_dt(const MmbmModel& model, double B, const SimConfig& config) {
    return config.dt > 0 ? config.dt : default_dt(model, B);
}

}  // namespace

double default_dt(const MmbmModel& model, double B) {
    const double max_sig = model.sigma2.maxCoeff();
    const double max_mu = model.mu.cwiseAbs().maxCoeff();
    double scale = 1.0;
    if (max_sig > 0) scale = std::min(scale, B * B / max_sig);
    if (max_mu > 0) scale = std::min(scale, B / max_mu);
    return 1e-3 * scale;
}

PathRecord simulate_path(const MmbmModel& model, const StripSpec& strip,
                         int j0, const SimConfig& config) {
    if (j0 < 0 || j0 >= model.size())
        throw std::invalid_argument("simulate_path: initial state out of range");
    if (strip.B <= 0 || strip.x0 < 0 || strip.x0 > strip.B)
        throw std::invalid_argument("simulate_path: invalid strip");
    const double dt = resolve_dt(model, strip.B, config);
    auto rng = make_stream(config.seed, 0);
    Stepper stepper(model, j0, rng, dt);

    PathRecord rec;
    double X = 0, W = strip.x0, L = 0, U = 0;
    auto sample = [&](double t) {
        rec.times.push_back(t);
        rec.X.push_back(X);
        rec.J.push_back(stepper.phase());
        rec.W.push_back(W);
        rec.L.push_back(L);
        rec.U.push_back(U);
    };
    rec.times.reserve(static_cast<std::size_t>(config.horizon / dt) + 2);
    sample(0.0);
    while (stepper.time() < config.horizon) {
        const auto s = stepper.next();
        X += s.dx;
        double w = W + s.dx;
        if (w < 0) {
            L += -w;
            w = 0;
        } else if (w > strip.B) {
            U += w - strip.B;
            w = strip.B;
        }
        W = w;
        sample(stepper.time());
    }
    return rec;
}

MatrixEstimate estimate_passage(const MmbmModel& model, double q, double x,
                                Direction dir, const SimConfig& config) {
    if (x <= 0) throw std::invalid_argument("estimate_passage: level must be positive");
    const PhaseClasses cls = phase_classes(model);
    const auto& phases = dir == Direction::up ? cls.e_plus : cls.e_minus;
    const int n = model.size();
    const int nc = static_cast<int>(phases.size());
    const double sign = dir == Direction::up ? 1.0 : -1.0;
    // Free-process time scale; the strip does not apply here.
    const double dt = config.dt > 0 ? config.dt : default_dt(model, std::max(1.0, x));

    Matrix counts = Matrix::Zero(n, nc);
    for (int i = 0; i < n; ++i) {
        for (int r = 0; r < config.replications; ++r) {
            auto rng = make_stream(config.seed,
                                   static_cast<std::uint64_t>(i) * 1000003ULL +
                                       static_cast<std::uint64_t>(r) + 1);
            double deadline = config.horizon;
            if (q > 0) {
                std::exponential_distribution<double> kill(q);
                deadline = std::min(deadline, kill(rng));
            }
            Stepper stepper(model, i, rng, dt);
            double X = 0;
            while (stepper.time() < deadline) {
                const auto s = stepper.next();
                X += s.dx;
                if (sign * X > x) {
                    if (stepper.time() <= deadline) {
                        const int c = column_of(phases, s.j);
                        if (c >= 0) counts(i, c) += 1;
                    }
                    break;
                }
            }
        }
    }
    MatrixEstimate est;
    est.value = counts / config.replications;
    est.stderr_ = (est.value.array() * (1.0 - est.value.array()) /
                   config.replications)
                      .sqrt()
                      .matrix();
    return est;
}

MatrixEstimate estimate_stationary(const MmbmModel& model, const StripSpec& strip,
                                   const Vector& levels, const SimConfig& config) {
    const double dt = resolve_dt(model, strip.B, config);
    const int n = model.size();
    const int nl = static_cast<int>(levels.size());
    const int nb = std::max(2, config.batches);
    auto rng = make_stream(config.seed, 0);
    Stepper stepper(model, 0, rng, dt);

    const double burn_in = 0.1 * config.horizon;
    const double batch_len = (config.horizon - burn_in) / nb;

    std::vector<Matrix> in_level(static_cast<std::size_t>(nb),
                                 Matrix::Zero(nl, n));
    std::vector<Vector> in_state(static_cast<std::size_t>(nb), Vector::Zero(n));
    double W = strip.x0;
    while (stepper.time() < config.horizon) {
        const auto s = stepper.next();
        double w = W + s.dx;
        if (w < 0)
            w = 0;
        else if (w > strip.B)
            w = strip.B;
        W = w;
        const double t = stepper.time();
        if (t < burn_in) continue;
        const int b = std::min(nb - 1, static_cast<int>((t - burn_in) / batch_len));
        in_state[static_cast<std::size_t>(b)](s.j) += s.h;
        for (int k = 0; k < nl; ++k)
            if (W <= levels(k)) in_level[static_cast<std::size_t>(b)](k, s.j) += s.h;
    }

    Matrix mean = Matrix::Zero(nl, n);
    Matrix m2 = Matrix::Zero(nl, n);
    Matrix counted = Matrix::Zero(nl, n);
    for (int b = 0; b < nb; ++b) {
        for (int j = 0; j < n; ++j) {
            if (in_state[static_cast<std::size_t>(b)](j) <= 0) continue;
            for (int k = 0; k < nl; ++k) {
                const double cdf = in_level[static_cast<std::size_t>(b)](k, j) /
                                   in_state[static_cast<std::size_t>(b)](j);
                mean(k, j) += cdf;
                m2(k, j) += cdf * cdf;
                counted(k, j) += 1;
            }
        }
    }
    MatrixEstimate est;
    est.value = Matrix::Zero(nl, n);
    est.stderr_ = Matrix::Zero(nl, n);
    for (int k = 0; k < nl; ++k)
        for (int j = 0; j < n; ++j) {
            const double c = counted(k, j);
            if (c < 2) {
                est.stderr_(k, j) = 1.0;
                continue;
            }
            const double m = mean(k, j) / c;
            const double var = std::max(0.0, m2(k, j) / c - m * m) * c / (c - 1);
            est.value(k, j) = m;
            est.stderr_(k, j) = std::sqrt(var / c);
        }
    return est;
}

OverflowEstimate estimate_overflow(const MmbmModel& model, const StripSpec& strip,
                                   const SimConfig& config) {
    const PhaseClasses cls = phase_classes(model);
    const double dt = resolve_dt(model, strip.B, config);
    const int nb = std::max(2, config.batches);
    auto rng = make_stream(config.seed, 0);
    Stepper stepper(model, 0, rng, dt);
    const double batch_len = config.horizon / nb;

    Matrix dl(nb, model.size());
    Matrix du(nb, model.size());
    dl.setZero();
    du.setZero();
    double W = strip.x0;
    while (stepper.time() < config.horizon) {
        const auto s = stepper.next();
        const int b = std::min(nb - 1, static_cast<int>(stepper.time() / batch_len));
        double w = W + s.dx;
        if (w < 0) {
            dl(b, s.j) += -w;  // pre-switch phase attribution
            w = 0;
        } else if (w > strip.B) {
            du(b, s.j) += w - strip.B;
            w = strip.B;
        }
        W = w;
    }

    auto batch_stats = [&](const Matrix& acc, const std::vector<int>& phases,
                           Vector& rate, Vector& se) {
        const int m = static_cast<int>(phases.size());
        rate = Vector::Zero(m);
        se = Vector::Zero(m);
        for (int k = 0; k < m; ++k) {
            double mean = 0, sq = 0;
            for (int b = 0; b < nb; ++b) {
                const double r = acc(b, phases[static_cast<std::size_t>(k)]) / batch_len;
                mean += r;
                sq += r * r;
            }
            mean /= nb;
            const double var = std::max(0.0, sq / nb - mean * mean) * nb / (nb - 1);
            rate(k) = mean;
            se(k) = std::sqrt(var / nb);
        }
    };
    OverflowEstimate est;
    batch_stats(dl, cls.e_minus, est.unused, est.unused_se);
    batch_stats(du, cls.e_plus, est.overflow, est.overflow_se);
    return est;
}

MatrixEstimate estimate_epoch(const MmbmModel& model, const StripSpec& strip,
                              double q, double x, const SimConfig& config) {
    if (q <= 0) throw std::invalid_argument("estimate_epoch: q must be positive");
    const int n = model.size();
    const double dt = resolve_dt(model, strip.B, config);
    Matrix counts = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int r = 0; r < config.replications; ++r) {
            auto rng = make_stream(config.seed,
                                   static_cast<std::uint64_t>(i) * 2000003ULL +
                                       static_cast<std::uint64_t>(r) + 1);
            std::exponential_distribution<double> kill(q);
            const double deadline = kill(rng);
            Stepper stepper(model, i, rng, dt);
            double W = strip.x0;
            int j = i;
            while (stepper.time() < deadline) {
                const auto s = stepper.next();
                double w = W + s.dx;
                if (w < 0)
                    w = 0;
                else if (w > strip.B)
                    w = strip.B;
                W = w;
                j = stepper.phase();
            }
            if (W >= x) counts(i, j) += 1;
        }
    }
    MatrixEstimate est;
    est.value = counts / config.replications;
    est.stderr_ = (est.value.array() * (1.0 - est.value.array()) /
                   config.replications)
                      .sqrt()
                      .matrix();
    return est;
}

JumpProcessEstimate estimate_overflow_jumps(const MmbmModel& model,
                                            const StripSpec& strip,
                                            const SimConfig& config) {
    const double dt = resolve_dt(model, strip.B, config);
    auto rng = make_stream(config.seed, 0);
    Stepper stepper(model, 0, rng, dt);
    double W = strip.x0, L = 0;
    double open_jump = 0;
    std::vector<double> sizes;
    while (stepper.time() < config.horizon) {
        const auto s = stepper.next();
        double w = W + s.dx;
        if (w < 0) {
            L += -w;
            if (open_jump > 0) {
                sizes.push_back(open_jump);
                open_jump = 0;
            }
            w = 0;
        } else if (w > strip.B) {
            open_jump += w - strip.B;
            w = strip.B;
        }
        W = w;
    }
    JumpProcessEstimate est;
    est.jump_count = sizes.size();
    if (sizes.empty() || L <= 0) return est;
    const double nj = static_cast<double>(sizes.size());
    est.jump_rate = nj / L;
    est.jump_rate_se = est.jump_rate / std::sqrt(nj);
    double mean = 0;
    for (double v : sizes) mean += v;
    mean /= nj;
    double var = 0;
    for (double v : sizes) var += (v - mean) * (v - mean);
    var /= std::max(1.0, nj - 1);
    est.size_rate = 1.0 / mean;
    est.size_rate_se = std::sqrt(var / nj) / (mean * mean);
    return est;
}

}  // namespace mmbm
