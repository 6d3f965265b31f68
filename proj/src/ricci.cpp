#include "ske/ricci.hpp"

#include <cmath>
#include <sstream>

#include "ske/errors.hpp"
#include "ske/io.hpp"

namespace ske::ricci {

using radial::radial_function;
using radial::radial_measure;

namespace {

constexpr double kDivergenceGuard = 1e6;

// Gibbs cumulative of v against mu, sampled at cell midpoints: the pairing
// partner of the slope-per-cell Monge-Ampere convention. Returns the node
// array R (R_0 = tail mass fraction) and the full normalization c.
struct gibbs_cumulative {
    std::vector<double> r; // size N+1, R_N = 1 - (half of last cell)/c
    double c = 0.0;        // int e^{-gamma v} dmu
    bool divergent = false;
};

gibbs_cumulative gibbs_mid(const radial_function& v, double gamma,
                           const radial_measure& mu) {
    const int N = v.g().n_points;
    gibbs_cumulative out;
    double tail = 0.0;
    const double head = mu.cumulative[0];
    if (mu.kappa) {
        const double kappa = *mu.kappa;
        if (gamma * v.lelong() >= kappa) {
            out.divergent = true;
            return out;
        }
        if (head > 0.0)
            tail = head * std::exp(-gamma * v.value(0)) * kappa /
                   (kappa - gamma * v.lelong());
    } else if (head > 0.0) {
        if (v.lelong() > 0.0) {
            out.divergent = true;
            return out;
        }
        tail = head * std::exp(-gamma * v.value(0));
    }
    std::vector<double> w(N + 1, 0.0);
    double c = tail;
    for (int j = 1; j <= N; ++j) {
        w[j] = mu.cell_mass(j) * std::exp(-gamma * v.cell_mid(j));
        c += w[j];
    }
    if (!std::isfinite(c) || !(c > 0.0)) {
        out.divergent = true;
        return out;
    }
    out.c = c;
    out.r.assign(N + 1, 0.0);
    out.r[0] = tail / c;
    double acc = tail;
    for (int j = 1; j <= N; ++j) {
        // Cumulative at the midpoint of cell j: half of the cell's weight.
        out.r[j] = (acc + 0.5 * w[j]) / c;
        acc += w[j];
    }
    return out;
}

// When the head mass r[0] is an atom at p the solution has the log pole
// v ~ r_0^{1/n} t; a conical tail below t_min instead has integrable slope
// and the solution stays bounded (zero Lelong number).
radial_function solve_from_cumulative(const std::vector<double>& r, const radial::grid& g,
                                      bool head_is_atom) {
    const int N = g.n_points;
    const int n = g.dim;
    const double h = g.h();
    std::vector<double> vals(N + 1);
    vals[N] = 0.0;
    for (int j = N; j >= 1; --j) {
        double d = std::pow(std::max(r[j], 0.0), 1.0 / n);
        vals[j - 1] = vals[j] - h * d;
    }
    double lelong = head_is_atom ? std::pow(std::max(r[0], 0.0), 1.0 / n) : 0.0;
    return radial_function(g, std::move(vals), lelong);
}

} // namespace

void iteration_config::validate() const {
    if (!(gamma > 0.0)) throw invalid_input("iteration_config: gamma must be positive");
    if (!(tol_sup > 0.0)) throw invalid_input("iteration_config: tol_sup must be positive");
    if (max_iter < 1) throw invalid_input("iteration_config: max_iter must be >= 1");
    mu.validate();
    if (std::abs(mu.total() - 1.0) > 1e-9)
        throw not_probability("iteration_config: mu must be a probability measure");
    if (!(initial.g() == mu.g))
        throw grid_mismatch("iteration_config: initial data and mu on different grids");
}

const char* to_string(iteration_status s) {
    switch (s) {
        case iteration_status::converged: return "Converged";
        case iteration_status::max_iter_reached: return "MaxIterReached";
        case iteration_status::diverged: return "Diverged";
    }
    return "?";
}

radial_function solve_dirichlet_radial(const radial_measure& rhs, int n) {
    rhs.validate();
    if (n != rhs.g.dim)
        throw invalid_input("solve_dirichlet_radial: n does not match grid dimension");
    // Probability up to the half-cell correction at the boundary.
    if (std::abs(rhs.total() - 1.0) > 0.05)
        throw not_probability("solve_dirichlet_radial: rhs is not a probability measure");
    return solve_from_cumulative(rhs.cumulative, rhs.g, !rhs.kappa.has_value());
}

std::pair<radial_function, double> ricci_step(const radial_function& v,
                                              const iteration_config& cfg) {
    if (!(v.g() == cfg.mu.g)) throw grid_mismatch("ricci_step: grid mismatch");
    auto gc = gibbs_mid(v, cfg.gamma, cfg.mu);
    if (gc.divergent)
        throw divergent_integral("ricci_step: e^{-gamma v} mu has no finite mass");
    return {solve_from_cumulative(gc.r, v.g(), false), gc.c};
}

double fixed_point_residual(const radial_function& v, const iteration_config& cfg) {
    if (!(v.g() == cfg.mu.g)) throw grid_mismatch("fixed_point_residual: grid mismatch");
    auto gc = gibbs_mid(v, cfg.gamma, cfg.mu);
    if (gc.divergent)
        throw divergent_integral("fixed_point_residual: divergent integral");
    auto ma = radial::ma_cumulative_mass(v);
    double r = 0.0;
    for (int i = 0; i <= v.g().n_points; ++i)
        r = std::max(r, std::abs(ma.cumulative[i] - gc.r[i]));
    return r;
}

iteration_trace ricci_iterate(const iteration_config& cfg) {
    cfg.validate();
    iteration_trace tr;
    radial_function v = cfg.initial;
    for (int j = 0; j <= cfg.max_iter; ++j) {
        if (v.sup_norm() > kDivergenceGuard) {
            tr.status = iteration_status::diverged;
            return tr;
        }
        auto gc = gibbs_mid(v, cfg.gamma, cfg.mu);
        if (gc.divergent) {
            tr.status = iteration_status::diverged;
            return tr;
        }
        xreal e = radial::energy_E0(v);
        double f = e.finite() ? e.value() + std::log(gc.c) / cfg.gamma
                              : -std::numeric_limits<double>::infinity();
        auto ma = radial::ma_cumulative_mass(v);
        double resid = 0.0;
        for (int i = 0; i <= v.g().n_points; ++i)
            resid = std::max(resid, std::abs(ma.cumulative[i] - gc.r[i]));

        tr.iterates.push_back(v);
        tr.f_values.push_back(f);
        tr.c_values.push_back(gc.c);
        tr.residuals.push_back(resid);

        if (j == cfg.max_iter) {
            tr.status = iteration_status::max_iter_reached;
            return tr;
        }
        radial_function next = solve_from_cumulative(gc.r, v.g(), false);
        double diff = 0.0;
        for (int i = 0; i <= v.g().n_points; ++i)
            diff = std::max(diff, std::abs(next.value(i) - v.value(i)));
        tr.sup_diffs.push_back(diff);
        v = std::move(next);
        if (diff <= cfg.tol_sup) {
            auto gc2 = gibbs_mid(v, cfg.gamma, cfg.mu);
            if (gc2.divergent) {
                tr.status = iteration_status::diverged;
                return tr;
            }
            xreal e2 = radial::energy_E0(v);
            auto ma2 = radial::ma_cumulative_mass(v);
            double resid2 = 0.0;
            for (int i = 0; i <= v.g().n_points; ++i)
                resid2 = std::max(resid2, std::abs(ma2.cumulative[i] - gc2.r[i]));
            tr.iterates.push_back(v);
            tr.f_values.push_back(e2.finite()
                                      ? e2.value() + std::log(gc2.c) / cfg.gamma
                                      : -std::numeric_limits<double>::infinity());
            tr.c_values.push_back(gc2.c);
            tr.residuals.push_back(resid2);
            tr.status = iteration_status::converged;
            return tr;
        }
    }
    tr.status = iteration_status::max_iter_reached;
    return tr;
}

void write_trace_csv(const std::filesystem::path& path, const iteration_trace& t) {
    std::ostringstream out;
    out << "iteration,F,residual,c,sup_diff\n";
    for (size_t j = 0; j < t.iterates.size(); ++j) {
        out << j << ',' << io::fmt_double(t.f_values[j]) << ','
            << io::fmt_double(t.residuals[j]) << ',' << io::fmt_double(t.c_values[j])
            << ',';
        if (j < t.sup_diffs.size()) out << io::fmt_double(t.sup_diffs[j]);
        out << '\n';
    }
    io::atomic_write(path, out.str());
}

} // namespace ske::ricci
