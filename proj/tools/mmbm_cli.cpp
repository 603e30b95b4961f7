// mmbm: analytic and Monte Carlo quantities for Markov-modulated Brownian
// motion reflected into a strip [0, B]. Subcommands emit CSV on stdout.
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmbm/localtime.hpp"
#include "mmbm/model_io.hpp"
#include "mmbm/simulate.hpp"

namespace {

using namespace mmbm;

constexpr int kExitBadInput = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitValidation = 3;

std::string label(const MmbmModel& model, int i) {
    return model.state_labels.empty() ? "s" + std::to_string(i)
                                      : model.state_labels[static_cast<std::size_t>(i)];
}

void cmd_passage(const ModelDocument& doc, double q, const std::string& direction,
                 const std::vector<double>& levels) {
    const Direction dir = direction == "down" ? Direction::down : Direction::up;
    const PassagePair pair = passage_matrices(doc.model, q, dir);
    const PhaseClasses cls = phase_classes(doc.model);
    const auto& phases = dir == Direction::up ? cls.e_plus : cls.e_minus;
    std::cout << "state_i,state_j,x,probability\n";
    for (double x : levels) {
        const Matrix p = crossing_probability(pair, x);
        for (int i = 0; i < doc.model.size(); ++i)
            for (int c = 0; c < p.cols(); ++c)
                std::cout << label(doc.model, i) << ','
                          << label(doc.model, phases[static_cast<std::size_t>(c)]) << ','
                          << format_real(x) << ',' << format_real(p(i, c)) << '\n';
    }
}

void cmd_stationary(const ModelDocument& doc, int grid) {
    const ReflectedLaw law = stationary_law(doc.model, doc.B, grid);
    std::cout << "state,x,survival,cdf,density,mass0,massB\n";
    for (int i = 0; i < doc.model.size(); ++i)
        for (Eigen::Index k = 0; k < law.grid.size(); ++k)
            std::cout << label(doc.model, i) << ',' << format_real(law.grid(k)) << ','
                      << format_real(law.survival(k, i)) << ','
                      << format_real(law.cdf(k, i)) << ','
                      << format_real(law.density(k, i)) << ','
                      << format_real(law.mass0(i)) << ','
                      << format_real(law.massB(i)) << '\n';
}

void cmd_exp_epoch(const ModelDocument& doc, double q, const std::string& start,
                   const std::vector<double>& levels) {
    std::cout << "x,state_i,state_j,probability\n";
    for (double x : levels) {
        const Matrix joint = exp_epoch_law(doc.model, doc.B, q, start == "top", x);
        for (int i = 0; i < doc.model.size(); ++i)
            for (int j = 0; j < doc.model.size(); ++j)
                std::cout << format_real(x) << ',' << label(doc.model, i) << ','
                          << label(doc.model, j) << ',' << format_real(joint(i, j))
                          << '\n';
    }
}

void cmd_localtime(const ModelDocument& doc, double q, double x0,
                   const std::vector<double>& alphas) {
    std::cout << "alpha,matrix,row,col,value\n";
    auto dump = [](double alpha, const char* name, const Matrix& m) {
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c)
                std::cout << format_real(alpha) << ',' << name << ',' << r << ',' << c
                          << ',' << format_real(m(r, c)) << '\n';
    };
    for (double alpha : alphas) {
        const LocalTimeTransform lt = localtime_transform(doc.model, doc.B, x0, q, alpha);
        dump(alpha, "ML", lt.ML);
        dump(alpha, "MU", lt.MU);
        dump(alpha, "FL", lt.FL);
        dump(alpha, "FU", lt.FU);
        std::cout << format_real(alpha) << ",kL,0,0," << format_real(lt.kL) << '\n';
        std::cout << format_real(alpha) << ",kU,0,0," << format_real(lt.kU) << '\n';
    }
}

void cmd_overflow(const ModelDocument& doc) {
    const OverflowRates rates = overflow_rates(doc.model, doc.B);
    const PhaseClasses cls = phase_classes(doc.model);
    std::cout << "phase,unused_rate,overflow_rate\n";
    for (int i = 0; i < doc.model.size(); ++i) {
        double unused = 0, over = 0;
        for (int k = 0; k < cls.n_minus(); ++k)
            if (cls.e_minus[static_cast<std::size_t>(k)] == i) unused = rates.unused(k);
        for (int k = 0; k < cls.n_plus(); ++k)
            if (cls.e_plus[static_cast<std::size_t>(k)] == i) over = rates.overflow(k);
        std::cout << label(doc.model, i) << ',' << format_real(unused) << ','
                  << format_real(over) << '\n';
    }
}

void cmd_simulate(const ModelDocument& doc, const SimConfig& config,
                  const std::string& estimator, double q, double x,
                  const std::string& direction, const std::vector<double>& levels) {
    StripSpec strip{doc.B, doc.x0.value_or(0.0)};
    if (estimator == "passage") {
        const Direction dir = direction == "down" ? Direction::down : Direction::up;
        const auto est = estimate_passage(doc.model, q, x, dir, config);
        std::cout << "state_i,col,estimate,stderr\n";
        for (int i = 0; i < est.value.rows(); ++i)
            for (int c = 0; c < est.value.cols(); ++c)
                std::cout << label(doc.model, i) << ',' << c << ','
                          << format_real(est.value(i, c)) << ','
                          << format_real(est.stderr_(i, c)) << '\n';
    } else if (estimator == "stationary") {
        Vector lv(static_cast<Eigen::Index>(levels.size()));
        for (std::size_t k = 0; k < levels.size(); ++k)
            lv(static_cast<Eigen::Index>(k)) = levels[k];
        const auto est = estimate_stationary(doc.model, strip, lv, config);
        std::cout << "x,state,cdf,stderr\n";
        for (int k = 0; k < est.value.rows(); ++k)
            for (int j = 0; j < est.value.cols(); ++j)
                std::cout << format_real(lv(k)) << ',' << label(doc.model, j) << ','
                          << format_real(est.value(k, j)) << ','
                          << format_real(est.stderr_(k, j)) << '\n';
    } else if (estimator == "overflow") {
        const auto est = estimate_overflow(doc.model, strip, config);
        const PhaseClasses cls = phase_classes(doc.model);
        std::cout << "phase,kind,rate,stderr\n";
        for (int k = 0; k < est.unused.size(); ++k)
            std::cout << label(doc.model, cls.e_minus[static_cast<std::size_t>(k)])
                      << ",unused," << format_real(est.unused(k)) << ','
                      << format_real(est.unused_se(k)) << '\n';
        for (int k = 0; k < est.overflow.size(); ++k)
            std::cout << label(doc.model, cls.e_plus[static_cast<std::size_t>(k)])
                      << ",overflow," << format_real(est.overflow(k)) << ','
                      << format_real(est.overflow_se(k)) << '\n';
    } else if (estimator == "epoch") {
        const auto est = estimate_epoch(doc.model, strip, q, x, config);
        std::cout << "state_i,state_j,estimate,stderr\n";
        for (int i = 0; i < est.value.rows(); ++i)
            for (int j = 0; j < est.value.cols(); ++j)
                std::cout << label(doc.model, i) << ',' << label(doc.model, j) << ','
                          << format_real(est.value(i, j)) << ','
                          << format_real(est.stderr_(i, j)) << '\n';
    } else if (estimator == "jumps") {
        const auto est = estimate_overflow_jumps(doc.model, strip, config);
        std::cout << "quantity,value,stderr\n";
        std::cout << "jump_rate," << format_real(est.jump_rate) << ','
                  << format_real(est.jump_rate_se) << '\n';
        std::cout << "size_rate," << format_real(est.size_rate) << ','
                  << format_real(est.size_rate_se) << '\n';
        std::cout << "jump_count," << est.jump_count << ",0\n";
    } else {
        throw IoError("unknown estimator: " + estimator);
    }
}

int cmd_validate(const ModelDocument& doc, double q) {
    bool ok = true;
    auto report = [&](const std::string& name, bool pass, double value) {
        std::cout << name << ": " << (pass ? "pass" : "FAIL")
                  << " (" << format_real(value) << ")\n";
        ok = ok && pass;
    };
    const double kappa = asymptotic_drift(doc.model);
    const bool zero_drift = q == 0 && std::abs(kappa) <= 1e-12;
    try {
        if (!zero_drift) {
            const PassagePair up = passage_matrices(doc.model, q, Direction::up);
            const PassagePair down = passage_matrices(doc.model, q, Direction::down);
            const double res = std::max(passage_residual(doc.model, q, up),
                                        passage_residual(doc.model, q, down));
            report("eigen_residual", res <= 1e-8, res);

            const PhaseClasses cls = phase_classes(doc.model);
            const Matrix cyc = restrict_rows(down.Pi, cls, +1) * expm(doc.B * down.Lambda) *
                               restrict_rows(up.Pi, cls, -1) * expm(doc.B * up.Lambda);
            const double cond = condition_estimate(
                Matrix::Identity(cyc.rows(), cyc.cols()) - cyc);
            report("K_conditioning", cond < 1e12, cond);
        } else {
            const auto cm = crossing_matrices_zero_drift(doc.model, doc.B / 2, doc.B / 2);
            const double rowsum =
                ((cm.C.rowwise().sum() + cm.D.rowwise().sum()).array() - 1.0)
                    .abs()
                    .maxCoeff();
            report("exit_certainty", rowsum <= 1e-9, rowsum);
        }
        // Complementarity of the two stationary representations.
        const ReflectedLaw law = stationary_law(doc.model, doc.B, 41);
        double worst = 0;
        for (Eigen::Index k = 1; k + 1 < law.grid.size(); ++k)
            worst = std::max(worst,
                             (law.survival.row(k) + law.cdf.row(k)).array().abs().maxCoeff() - 1.0);
        worst = std::abs(worst);
        report("complementarity", worst <= 1e-9, worst);

        if (q > 0 || std::abs(kappa) > 1e-12) {
            const double qq = q > 0 ? q : 0.5;
            const auto interval = admissible_alpha(doc.model, qq);
            const double alpha = 0.5 * (interval.first + interval.second);
            const LocalTimeTransform lt =
                localtime_transform(doc.model, doc.B, 0.0, qq, alpha);
            report("perron_negativity", lt.kL < 0 && lt.kU < 0,
                   std::max(lt.kL, lt.kU));
        }
    } catch (const std::exception& e) {
        std::cerr << "validation aborted: " << e.what() << '\n';
        return kExitValidation;
    }
    return ok ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reflected Markov-modulated Brownian motion toolkit"};
    app.require_subcommand(1);

    std::string model_file;
    double q = 0.0, x = 1.0, x0 = 0.0;
    int grid = 201;
    std::string direction = "up", start = "bottom", estimator = "stationary";
    std::vector<double> levels, alphas;
    SimConfig config;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("model", model_file, "model JSON file")->required();
        return sub;
    };
    auto* p = add_common(app.add_subcommand("passage", "first-passage probabilities"));
    p->add_option("--q", q);
    p->add_option("--direction", direction)->check(CLI::IsMember({"up", "down"}));
    p->add_option("--levels", levels)->delimiter(',');

    auto* s = add_common(app.add_subcommand("stationary", "stationary law of W"));
    s->add_option("--grid", grid);

    auto* e = add_common(app.add_subcommand("exp-epoch", "law at an exponential epoch"));
    e->add_option("--q", q)->required();
    e->add_option("--start", start)->check(CLI::IsMember({"bottom", "top"}));
    e->add_option("--levels", levels)->delimiter(',');

    auto* l = add_common(app.add_subcommand("localtime", "inverse local time transforms"));
    l->add_option("--q", q);
    l->add_option("--alpha-grid", alphas)->delimiter(',');
    l->add_option("--x0", x0);

    add_common(app.add_subcommand("overflow", "stationary overflow and unused capacity"));

    auto* m = add_common(app.add_subcommand("simulate", "Monte Carlo estimators"));
    m->add_option("--dt", config.dt);
    m->add_option("--horizon", config.horizon);
    m->add_option("--reps", config.replications);
    m->add_option("--seed", config.seed);
    m->add_option("--estimator", estimator)
        ->check(CLI::IsMember({"passage", "stationary", "overflow", "epoch", "jumps"}));
    m->add_option("--q", q);
    m->add_option("--x", x);
    m->add_option("--direction", direction)->check(CLI::IsMember({"up", "down"}));
    m->add_option("--levels", levels)->delimiter(',');

    auto* v = add_common(app.add_subcommand("validate", "self-consistency report"));
    v->add_option("--q", q);

    CLI11_PARSE(app, argc, argv);

    try {
        const ModelDocument doc = load_model_document(model_file);
        if (levels.empty()) levels = {doc.B / 2};
        if (alphas.empty()) alphas = {0.0};
        if (app.got_subcommand("passage"))
            cmd_passage(doc, p->count("--q") ? q : doc.q.value_or(0.0), direction, levels);
        else if (app.got_subcommand("stationary"))
            cmd_stationary(doc, grid);
        else if (app.got_subcommand("exp-epoch"))
            cmd_exp_epoch(doc, q, start, levels);
        else if (app.got_subcommand("localtime"))
            cmd_localtime(doc, q, x0, alphas);
        else if (app.got_subcommand("overflow"))
            cmd_overflow(doc);
        else if (app.got_subcommand("simulate"))
            cmd_simulate(doc, config, estimator, q, x, direction, levels);
        else if (app.got_subcommand("validate"))
            return cmd_validate(doc, q);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const ModelError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
