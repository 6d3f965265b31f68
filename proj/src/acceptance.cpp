#include "ske/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "ske/io.hpp"
#include "ske/lattice.hpp"
#include "ske/mt.hpp"
#include "ske/radial.hpp"
#include "ske/ricci.hpp"

namespace ske::acceptance {

namespace {

using lattice::monomial_ideal;
using radial::radial_function;

struct check {
    bool ok = true;
    std::ostringstream log;

    void expect(bool cond, const std::string& msg) {
        if (!cond) {
            ok = false;
            if (log.tellp() > 0) log << "; ";
            log << msg;
        }
    }
};

std::string fd(double x) { return io::fmt_double(x); }

radial::grid make_grid(int N, int dim) {
    radial::grid g;
    g.t_min = -20.0;
    g.n_points = N;
    g.dim = dim;
    return g;
}

// Random convex nondecreasing v with v(0) = 0, zero Lelong number.
radial_function random_convex(std::mt19937_64& rng, const radial::grid& g,
                              radial_function* smaller = nullptr) {
    std::uniform_int_distribution<int> knots_dist(2, 6);
    std::uniform_real_distribution<double> pos(g.t_min * 0.9, -0.05);
    std::uniform_real_distribution<double> inc(0.05, 1.0);
    const int N = g.n_points;
    auto build = [&](const std::vector<double>& at, const std::vector<double>& step) {
        std::vector<double> vals(N + 1);
        vals[N] = 0.0;
        for (int j = N; j >= 1; --j) {
            double mid = 0.5 * (g.node(j - 1) + g.node(j));
            double s = 0.0;
            for (size_t k = 0; k < at.size(); ++k)
                if (mid >= at[k]) s += step[k];
            vals[j - 1] = vals[j] - g.h() * s;
        }
        return radial_function(g, std::move(vals), 0.0);
    };
    int knots = knots_dist(rng);
    std::vector<double> at(knots), step(knots);
    for (auto& a : at) a = pos(rng);
    std::sort(at.begin(), at.end());
    for (auto& s : step) s = inc(rng);
    if (smaller) {
        // A pointwise-smaller convex companion: add extra slope increments.
        std::vector<double> at2 = at, step2 = step;
        int extra = knots_dist(rng);
        for (int i = 0; i < extra; ++i) {
            at2.push_back(pos(rng));
            step2.push_back(inc(rng));
        }
        *smaller = build(at2, step2);
    }
    return build(at, step);
}

radial::radial_measure random_probability(std::mt19937_64& rng, const radial::grid& g) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int N = g.n_points;
    std::vector<double> mass(N + 1, 0.0);
    double total = 0.0;
    for (int c = 0; c <= N; ++c) {
        if (unif(rng) < 0.05) continue; // leave some cells empty
        mass[c] = std::exp(0.8 * gauss(rng) - 2.0 * double(N - c) / N);
        total += mass[c];
    }
    radial::radial_measure mu;
    mu.g = g;
    mu.cumulative.resize(N + 1);
    double acc = 0.0;
    for (int c = 0; c <= N; ++c) {
        acc += mass[c] / total;
        mu.cumulative[c] = acc;
    }
    mu.cumulative[N] = 1.0;
    return mu;
}

monomial_ideal odp_square_ideal(int n) {
    std::vector<lattice::exponent_vector> gens;
    for (int i = 0; i < n; ++i) {
        lattice::exponent_vector g(n, 0);
        g[i] = 2;
        gens.push_back(std::move(g));
    }
    return monomial_ideal::create(n, std::move(gens));
}

// ------------------------------------------------------------------ C1

criterion_result c1_odp_invariants(const settings&) {
    check c;
    for (int n = 2; n <= 6; ++n) {
        rational lct = lattice::lct_monomial(odp_square_ideal(n));
        c.expect(lct == rational(n) / 2,
                 "lct((z_i^2), n=" + std::to_string(n) + ") = " + lct.str() +
                     " != " + (rational(n) / 2).str());
        auto d = lattice::ak_valuation_data(n, 1, 1.0);
        double expect_vh = 2.0 * std::pow(double(n - 1), n);
        double got_vh = std::pow(d.log_discrepancy, n) * d.volume;
        c.expect(std::abs(d.log_discrepancy - (n - 1)) < 1e-14,
                 "ODP log discrepancy n=" + std::to_string(n));
        c.expect(std::abs(got_vh - expect_vh) <= 1e-12 * expect_vh,
                 "ODP A^n vol n=" + std::to_string(n) + ": " + fd(got_vh));
        // e(I^2) = 2^n vol(F) = 2^{n+1} (the blowup divisor computes I^2).
        double e_i2 = std::pow(2.0, n) * d.volume;
        c.expect(e_i2 == std::pow(2.0, n + 1),
                 "e(I^2) n=" + std::to_string(n) + ": " + fd(e_i2));
    }
    for (const auto& p : lattice::builtin_profiles()) {
        if (p.name.rfind("ODP_n", 0) != 0) continue;
        int n = p.n;
        c.expect(p.lct == double(n - 1), p.name + " lct");
        c.expect(p.vol_hat == 2.0 * std::pow(double(n - 1), n), p.name + " vol_hat");
        c.expect(p.mult == 2, p.name + " mult");
    }
    criterion_result r{1, "ODP invariants (lct = n/2, vol = 2(n-1)^n, e(I^2) = 2^{n+1})",
                       c.ok, c.log.str(), 0.0};
    return r;
}

// ------------------------------------------------------------------ C2

criterion_result c2_ak_volume(const settings&) {
    check c;
    for (int n : {2, 3, 4, 6}) {
        for (int k : {1, 2, 3, 9}) {
            auto t0 = std::chrono::steady_clock::now();
            auto res = lattice::normalized_volume_ak(n, k, 1e-9);
            double want = lattice::ak_vol_hat_closed_form(n, k);
            double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            c.expect(std::abs(res.vol_hat - want) <= 1e-6 * want,
                     "ak(" + std::to_string(n) + "," + std::to_string(k) + ") = " +
                         fd(res.vol_hat) + " want " + fd(want));
            c.expect(dt < 1.0, "ak search too slow");
        }
    }
    return {2, "A_k normalized volume matches the closed form (rel 1e-6)", c.ok,
            c.log.str(), 0.0};
}

// ------------------------------------------------------------------ C3

criterion_result c3_smooth_volume(const settings&) {
    check c;
    for (int n : {2, 3, 4}) {
        auto res = lattice::normalized_volume_smooth(n, 1e-8);
        double want = std::pow(double(n), n);
        c.expect(std::abs(res.vol_hat - want) <= 1e-6 * want,
                 "smooth(" + std::to_string(n) + ") = " + fd(res.vol_hat));
        double wmin = res.argmin.weights[0], wmax = wmin;
        for (double w : res.argmin.weights) {
            wmin = std::min(wmin, w);
            wmax = std::max(wmax, w);
        }
        c.expect(wmax - wmin <= 1e-4,
                 "smooth(" + std::to_string(n) + ") argmin spread " + fd(wmax - wmin));
    }
    return {3, "smooth normalized volume = n^n with equal argmin weights", c.ok,
            c.log.str(), 0.0};
}

// ------------------------------------------------------------------ C4

criterion_result c4_multiplicity_oracle(const settings& s) {
    check c;
    using ev = lattice::exponent_vector;
    std::vector<std::pair<std::string, monomial_ideal>> corpus;
    auto add2 = [&](const std::string& name, std::vector<ev> g) {
        corpus.emplace_back(name, monomial_ideal::create(2, std::move(g)));
    };
    add2("(x,y)", {{1, 0}, {0, 1}});
    add2("(x2,y3)", {{2, 0}, {0, 3}});
    add2("(x2,y2)", {{2, 0}, {0, 2}});
    add2("(x3,y2)", {{3, 0}, {0, 2}});
    add2("(x3,xy,y3)", {{3, 0}, {1, 1}, {0, 3}});
    add2("(x4,x2y,y2)", {{4, 0}, {2, 1}, {0, 2}});
    add2("(x2,xy,y4)", {{2, 0}, {1, 1}, {0, 4}});
    add2("(x3,xy2,y4)", {{3, 0}, {1, 2}, {0, 4}});
    corpus.emplace_back("(x,y,z)",
                        monomial_ideal::create(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
    corpus.emplace_back("(x2,y2,z2)",
                        monomial_ideal::create(3, {{2, 0, 0}, {0, 2, 0}, {0, 0, 2}}));
    for (const auto& [name, ideal] : corpus) {
        double cov = to_double(lattice::multiplicity_covolume(ideal));
        auto fit = lattice::multiplicity_length_oracle(ideal, s.m_max);
        c.expect(std::abs(cov - fit.estimate) <= 0.01 * cov,
                 name + ": covolume " + fd(cov) + " vs oracle " + fd(fit.estimate));
    }
    return {4, "multiplicity: covolume vs length oracle within 1% on 10 ideals",
            c.ok, c.log.str(), 0.0};
}

// ------------------------------------------------------------------ C5

criterion_result c5_ricci(const settings& s) {
    check c;
    struct case_t { int n; double kappa, gamma; };
    for (case_t tc : {case_t{1, 2.0, 1.0}, case_t{2, 4.0, 2.0}, case_t{2, 3.0, 1.5}}) {
        auto t0 = std::chrono::steady_clock::now();
        std::vector<radial_function> solutions;
        for (int N : {s.grid_n, 2 * s.grid_n, 4 * s.grid_n}) {
            auto g = make_grid(N, tc.n);
            ricci::iteration_config cfg;
            cfg.gamma = tc.gamma;
            cfg.mu = radial::radial_measure::model(g, tc.kappa);
            cfg.initial = radial_function::zero(g);
            cfg.tol_sup = 1e-11;
            cfg.max_iter = 4000;
            auto tr = ricci::ricci_iterate(cfg);
            std::string tag = "(" + std::to_string(tc.n) + "," + fd(tc.kappa) + "," +
                              fd(tc.gamma) + ")@" + std::to_string(N);
            c.expect(tr.status == ricci::iteration_status::converged,
                     tag + ": status " + ricci::to_string(tr.status));
            if (tr.status != ricci::iteration_status::converged) break;
            if (N == s.grid_n) {
                c.expect(tr.residuals.back() <= 1e-6,
                         tag + ": residual " + fd(tr.residuals.back()));
                double min_step = 0.0;
                for (size_t j = 1; j < tr.f_values.size(); ++j)
                    min_step = std::min(min_step, tr.f_values[j] - tr.f_values[j - 1]);
                c.expect(min_step >= -1e-10, tag + ": F decreased by " + fd(-min_step));
            }
            solutions.push_back(tr.final_iterate());
        }
        if (solutions.size() == 3) {
            auto diff = [](const radial_function& coarse, const radial_function& fine) {
                double d = 0.0;
                for (int i = 0; i <= coarse.g().n_points; ++i)
                    d = std::max(d, std::abs(coarse.value(i) - fine.value(2 * i)));
                return d;
            };
            double e1 = diff(solutions[0], solutions[1]);
            double e2 = diff(solutions[1], solutions[2]);
            c.expect(e2 < 1e-14 || e1 >= 3.0 * e2,
                     "grid refinement ratio " + fd(e2 > 0 ? e1 / e2 : 0.0));
        }
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        c.expect(dt < 20.0, "ricci case too slow: " + fd(dt) + " s");
    }
    return {5, "Ricci iteration: residual <= 1e-6, F monotone, 3x grid gain",
            c.ok, c.log.str(), 0.0};
}

// ------------------------------------------------------------------ C6

criterion_result c6_gamma_crit(const settings& s) {
    check c;
    struct case_t { int n; double kappa, target; };
    for (case_t tc : {case_t{1, 2.0, 2.0}, case_t{2, 4.0, 3.0}, case_t{2, 3.0, 2.25}}) {
        auto cfg = mt::scan_config::defaults(tc.n, tc.kappa, make_grid(s.grid_n, tc.n),
                                             s.eps_rungs);
        auto res = mt::gamma_crit_estimate(cfg);
        c.expect(std::abs(res.gamma_est - tc.target) <= 0.2,
                 "gamma_crit(n=" + std::to_string(tc.n) + ",kappa=" + fd(tc.kappa) +
                     ") = " + fd(res.gamma_est) + " want " + fd(tc.target));
    }
    return {6, "critical exponent estimate (n+1)/n * kappa/2 within 0.2", c.ok,
            c.log.str(), 0.0};
}

// ------------------------------------------------------------------ C7

criterion_result c7_asymptotics(const settings& s) {
    check c;
    {
        auto cfg = mt::scan_config::defaults(2, 4.0, make_grid(s.grid_n, 2), s.eps_rungs);
        for (double gamma : {0.5, 1.0, 1.5}) {
            for (double lambda : {1.2, 2.6, 3.4}) {
                double predicted = std::max(gamma * lambda - cfg.kappa / 2.0, 0.0);
                auto fit = mt::estlct_slope(gamma, lambda, cfg);
                if (predicted > 0.05)
                    c.expect(std::abs(fit.slope - predicted) <= 0.05 * predicted,
                             "estlct(" + fd(gamma) + "," + fd(lambda) + ") slope " +
                                 fd(fit.slope) + " want " + fd(predicted));
                else
                    c.expect(std::abs(fit.slope) <= 0.02,
                             "estlct(" + fd(gamma) + "," + fd(lambda) +
                                 ") slope " + fd(fit.slope) + " want 0");
            }
        }
    }
    {
        auto cfg1 = mt::scan_config::defaults(1, 2.0, make_grid(s.grid_n, 1), s.eps_rungs);
        auto f1 = mt::mult_slope(1.0, cfg1);
        c.expect(std::abs(f1.slope - 0.25) <= 0.05 * 0.25,
                 "mult_slope(1, n=1) = " + fd(f1.slope) + " want 0.25");
        auto cfg2 = mt::scan_config::defaults(2, 4.0, make_grid(s.grid_n, 2), s.eps_rungs);
        auto f2 = mt::mult_slope(2.0, cfg2);
        c.expect(std::abs(f2.slope - 4.0 / 3.0) <= 0.05 * 4.0 / 3.0,
                 "mult_slope(2, n=2) = " + fd(f2.slope) + " want 4/3");
        auto f2a = mt::mult_slope(1.0, cfg2);
        double ratio = f2.slope / f2a.slope;
        c.expect(std::abs(ratio - 8.0) <= 0.05 * 8.0,
                 "mult_slope doubling ratio " + fd(ratio) + " want 2^{n+1} = 8");
    }
    return {7, "Green-family asymptotics: estlct and mult slopes within 5%", c.ok,
            c.log.str(), 0.0};
}

// ------------------------------------------------------------------ C8

criterion_result c8_entropy_duality(const settings& s) {
    check c;
    const int N = s.reduced ? 1024 : 4096;
    auto g = make_grid(N, 1);
    std::mt19937_64 rng(20240817ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        auto mu = random_probability(rng, g);
        std::vector<double> gv(N + 1);
        double a = gauss(rng), b = gauss(rng);
        for (int i = 0; i <= N; ++i) {
            double t = g.node(i);
            gv[i] = a * std::sin(0.4 * t) + b * t / 10.0;
        }
        auto gres = radial::gibbs_measure(gv, mu);
        double defect = radial::duality_defect(gv, mu, {mu, gres.nu});
        c.expect(std::abs(defect) <= 1e-8,
                 "duality defect trial " + std::to_string(trial) + ": " + fd(defect));
    }
    auto gh = make_grid(256, 1);
    std::mt19937_64 rng2(777ULL);
    int zero_cases = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        auto mu = random_probability(rng2, gh);
        auto nu = (trial % 5 == 0) ? mu : random_probability(rng2, gh);
        if (trial % 5 == 0) ++zero_cases;
        xreal h = radial::entropy_relative(nu, mu);
        if (!h.finite()) continue; // nu charges a mu-null cell: H = +inf >= 0
        c.expect(h.value() >= 0.0, "negative entropy " + fd(h.value()));
        bool equal = true;
        for (int i = 0; i <= gh.n_points && equal; ++i)
            if (std::abs(nu.cumulative[i] - mu.cumulative[i]) > 1e-12) equal = false;
        if (equal)
            c.expect(h.value() <= 1e-12, "H(nu,nu) = " + fd(h.value()));
        else
            c.expect(h.value() > 1e-12, "H = 0 for distinct measures");
    }
    c.expect(zero_cases >= 100, "too few equal-pair cases");
    return {8, "entropy duality: Gibbs defect <= 1e-8, H >= 0 with equality iff equal",
            c.ok, c.log.str(), 0.0};
}

// ------------------------------------------------------------------ C9

criterion_result c9_energy(const settings& s) {
    check c;
    std::mt19937_64 rng(424242ULL);
    // Homogeneity E(lambda v) = lambda^{n+1} E(v), an identity of the
    // discrete quadrature.
    for (int n = 1; n <= 3; ++n) {
        auto g = make_grid(std::max(256, s.grid_n / 4), n);
        for (int trial = 0; trial < 50; ++trial) {
            auto v = random_convex(rng, g);
            double e = radial::energy_E0(v).value();
            for (double lambda : {0.5, 2.0}) {
                std::vector<double> sv(v.values());
                for (auto& x : sv) x *= lambda;
                radial_function vl(g, std::move(sv), 0.0);
                double el = radial::energy_E0(vl).value();
                double want = std::pow(lambda, n + 1) * e;
                c.expect(std::abs(el - want) <= 1e-10 * std::max(1e-30, std::abs(want)),
                         "homogeneity rel err " + fd(std::abs(el - want) /
                                                     std::max(1e-300, std::abs(want))));
            }
        }
    }
    // Energy comparison sandwich on ordered pairs, within quadrature
    // tolerance (the discrete pairing is second-order accurate).
    int pair_trials = s.reduced ? 300 : 1000;
    for (int n = 1; n <= 2; ++n) {
        auto g = make_grid(std::max(512, s.grid_n / 2), n);
        const double quad_tol = 25.0 * g.h() * g.h();
        for (int trial = 0; trial < pair_trials / 2; ++trial) {
            radial_function v1 = radial_function::zero(g); // overwritten below
            radial_function v2 = random_convex(rng, g, &v1);
            double e1 = radial::energy_E0(v1).value();
            double e2 = radial::energy_E0(v2).value();
            auto m1 = radial::ma_cumulative_mass(v1);
            auto m2 = radial::ma_cumulative_mass(v2);
            auto pair_int = [&](const radial::radial_measure& m) {
                double acc = 0.0;
                for (int j = 1; j <= g.n_points; ++j)
                    acc += (v1.cell_mid(j) - v2.cell_mid(j)) * m.cell_mass(j);
                return acc;
            };
            double scale = std::max({1.0, std::abs(e1), std::abs(e2)});
            c.expect(pair_int(m1) <= e1 - e2 + quad_tol * scale,
                     "comparison lower bound violated");
            c.expect(e1 - e2 <= pair_int(m2) + quad_tol * scale,
                     "comparison upper bound violated");
        }
    }
    return {9, "energy: exact homogeneity and comparison inequalities", c.ok,
            c.log.str(), 0.0};
}

// ------------------------------------------------------------------ C10

criterion_result c10_bounds(const settings&) {
    check c;
    for (const auto& p : lattice::builtin_profiles()) {
        try {
            auto r = lattice::bounds_report(p);
            c.expect(r.alpha_lower <= r.alpha_upper + 1e-12, p.name + ": lower > upper");
            if (p.name.rfind("smooth", 0) == 0)
                c.expect(std::abs(r.gamma_upper - r.gamma_lower) < 1e-12,
                         p.name + ": gamma window width " +
                             fd(r.gamma_upper - r.gamma_lower));
        } catch (const std::exception& e) {
            c.expect(false, p.name + ": " + e.what());
        }
    }
    return {10, "bound chain consistent on the profile corpus", c.ok, c.log.str(), 0.0};
}

} // namespace

criterion_result run_one(int id, const settings& s) {
    auto t0 = std::chrono::steady_clock::now();
    criterion_result r;
    switch (id) {
        case 1: r = c1_odp_invariants(s); break;
        case 2: r = c2_ak_volume(s); break;
        case 3: r = c3_smooth_volume(s); break;
        case 4: r = c4_multiplicity_oracle(s); break;
        case 5: r = c5_ricci(s); break;
        case 6: r = c6_gamma_crit(s); break;
        case 7: r = c7_asymptotics(s); break;
        case 8: r = c8_entropy_duality(s); break;
        case 9: r = c9_energy(s); break;
        case 10: r = c10_bounds(s); break;
        default: throw invalid_input("unknown acceptance criterion id");
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<criterion_result> run_all(const settings& s) {
    std::vector<criterion_result> out;
    for (int id = 1; id <= 10; ++id) {
        try {
            out.push_back(run_one(id, s));
        } catch (const std::exception& e) {
            criterion_result r;
            r.id = id;
            r.name = "criterion " + std::to_string(id);
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
            out.push_back(r);
        }
    }
    return out;
}

} // namespace ske::acceptance
