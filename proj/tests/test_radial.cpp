#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "ske/errors.hpp"
#include "ske/radial.hpp"

using namespace ske;
using namespace ske::radial;

namespace {

grid make_grid(int N, int dim, double t_min = -20.0) {
    grid g;
    g.t_min = t_min;
    g.n_points = N;
    g.dim = dim;
    return g;
}

radial_function linear(const grid& g, double slope) {
    std::vector<double> vals(g.n_points + 1);
    for (int i = 0; i <= g.n_points; ++i) vals[i] = slope * g.node(i);
    return radial_function(g, std::move(vals), slope);
}

radial_function random_convex(std::mt19937_64& rng, const grid& g) {
    std::uniform_int_distribution<int> nk(2, 6);
    std::uniform_real_distribution<double> pos(g.t_min * 0.9, -0.05);
    std::uniform_real_distribution<double> inc(0.05, 1.0);
    int knots = nk(rng);
    std::vector<double> at(knots), step(knots);
    for (auto& a : at) a = pos(rng);
    std::sort(at.begin(), at.end());
    for (auto& s : step) s = inc(rng);
    const int N = g.n_points;
    std::vector<double> vals(N + 1);
    vals[N] = 0.0;
    for (int j = N; j >= 1; --j) {
        double mid = 0.5 * (g.node(j - 1) + g.node(j));
        double s = 0.0;
        for (int k = 0; k < knots; ++k)
            if (mid >= at[k]) s += step[k];
        vals[j - 1] = vals[j] - g.h() * s;
    }
    return radial_function(g, std::move(vals), 0.0);
}

// Independent fine-grid quadrature oracle for the energy, with Richardson
// extrapolation; uses direct trapezoid sums instead of the cell convention.
double energy_oracle(int n, double (*v)(double), double (*vp)(double), double t_min) {
    auto once = [&](int pts) {
        double h = -t_min / pts;
        double acc = 0.0;
        double prev_m = std::pow(vp(t_min), n);
        for (int i = 1; i <= pts; ++i) {
            double t = t_min + i * h;
            double m = std::pow(vp(t), n);
            acc += 0.5 * (v(t) + v(t - h)) * (m - prev_m);
            prev_m = m;
        }
        return acc / (n + 1);
    };
    double c1 = once(40000), c2 = once(80000);
    return c2 + (c2 - c1) / 3.0;
}

} // namespace

TEST_CASE("grid and function invariants") {
    auto g = make_grid(128, 1);
    CHECK(g.node(g.n_points) == 0.0);
    CHECK(g.node(0) == -20.0);
    CHECK_THROWS_AS(make_grid(32, 1).validate(), invalid_input);
    CHECK_THROWS_AS(make_grid(128, 0).validate(), invalid_input);

    // nonzero boundary value rejected
    std::vector<double> bad(129, 1.0);
    CHECK_THROWS_AS(radial_function(g, bad, 0.0), invalid_input);
    // concave data rejected
    std::vector<double> conc(129);
    for (int i = 0; i <= 128; ++i) {
        double t = g.node(i);
        conc[i] = -t * t / 40.0 + t; // v'' < 0
    }
    conc[128] = 0.0;
    CHECK_THROWS_AS(radial_function(g, conc, 0.0), not_convex);
}

TEST_CASE("calibration: v(t) = t has unit Monge-Ampere mass on every grid") {
    for (int n : {1, 2, 3}) {
        // Node coordinates are binary-exact for power-of-two N, so the
        // calibration is bitwise there; other sizes see only node roundoff.
        for (int N : {64, 128, 2048}) {
            auto g = make_grid(N, n);
            auto ma = ma_cumulative_mass(linear(g, 1.0));
            for (double m : ma.cumulative) CHECK(m == 1.0);
        }
        auto g = make_grid(100, n);
        auto ma = ma_cumulative_mass(linear(g, 1.0));
        for (double m : ma.cumulative) CHECK(std::abs(m - 1.0) <= 1e-12);
    }
}

TEST_CASE("ma mass: smooth example v = e^{2t} - 1 in dimension 1") {
    auto g = make_grid(2048, 1);
    std::vector<double> vals(g.n_points + 1);
    for (int i = 0; i <= g.n_points; ++i) vals[i] = std::exp(2.0 * g.node(i)) - 1.0;
    vals[g.n_points] = 0.0;
    radial_function v(g, std::move(vals), 0.0);
    auto ma = ma_cumulative_mass(v);
    CHECK(ma.cumulative[0] == 0.0); // no point mass at p
    // Compare on cells where e^{2t} is resolved above double cancellation;
    // the difference quotient carries the sinh(h)/h factor ~ 1 + h^2/6.
    for (int j = 1300; j <= g.n_points; j += 97) {
        double mid = 0.5 * (g.node(j - 1) + g.node(j));
        double want = 2.0 * std::exp(2.0 * mid);
        CHECK(std::abs(ma.cumulative[j] - want) <= 5e-5 * want);
    }
}

TEST_CASE("green family: closed forms") {
    auto g = make_grid(1024, 2);
    auto v0 = green_family(0.7, 0.0, g);
    CHECK(v0.lelong() == doctest::Approx(1.4));
    for (int i = 0; i <= g.n_points; i += 100)
        CHECK(v0.value(i) == doctest::Approx(1.4 * g.node(i)));
    CHECK(ma_cumulative_mass(v0).total() == doctest::Approx(std::pow(1.4, 2)));

    auto v1 = green_family(1.0, 1.0, g);
    CHECK(v1.value(g.n_points) == 0.0);
    CHECK(v1.value(0) == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
    CHECK(v1.lelong() == 0.0);

    // total mass (v'(0))^n = (2 lambda / (1 + eps^2))^n up to O(h)
    double lambda = 0.8, eps = 0.3;
    auto v2 = green_family(lambda, eps, g);
    double want = std::pow(2.0 * lambda / (1.0 + eps * eps), 2);
    CHECK(std::abs(ma_cumulative_mass(v2).total() - want) < 0.02 * want);
}

TEST_CASE("energy: trivial, closed form, and homogeneity") {
    auto g = make_grid(2048, 1);
    CHECK(energy_E0(radial_function::zero(g)).value() == 0.0);

    // v = lambda (e^{2t} - 1): E = -lambda^2 / 2 in dimension 1
    for (double lambda : {0.3, 1.0}) {
        std::vector<double> vals(g.n_points + 1);
        for (int i = 0; i <= g.n_points; ++i)
            vals[i] = lambda * (std::exp(2.0 * g.node(i)) - 1.0);
        vals[g.n_points] = 0.0;
        radial_function v(g, std::move(vals), 0.0);
        CHECK(energy_E0(v).value() ==
              doctest::Approx(-lambda * lambda / 2.0).epsilon(2e-4));
    }

    // Lelong pole makes the energy -inf
    CHECK(energy_E0(linear(g, 1.0)).is_neg_inf());

    std::mt19937_64 rng(5u);
    for (int n : {1, 2}) {
        auto gn = make_grid(512, n);
        for (int trial = 0; trial < 20; ++trial) {
            auto v = random_convex(rng, gn);
            double e = energy_E0(v).value();
            CHECK(e <= 0.0);
            for (double lam : {0.5, 2.0}) {
                std::vector<double> sv = v.values();
                for (auto& x : sv) x *= lam;
                radial_function vl(gn, std::move(sv), 0.0);
                double want = std::pow(lam, n + 1) * e;
                CHECK(energy_E0(vl).value() ==
                      doctest::Approx(want).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("energy agrees with the Richardson fine-grid oracle") {
    auto g = make_grid(2048, 1);
    std::vector<double> vals(g.n_points + 1);
    for (int i = 0; i <= g.n_points; ++i) vals[i] = std::exp(2.0 * g.node(i)) - 1.0;
    vals[g.n_points] = 0.0;
    radial_function v(g, std::move(vals), 0.0);
    double oracle = energy_oracle(
        1, [](double t) { return std::exp(2.0 * t) - 1.0; },
        [](double t) { return 2.0 * std::exp(2.0 * t); }, g.t_min);
    CHECK(energy_E0(v).value() == doctest::Approx(oracle).epsilon(2e-4));
}

TEST_CASE("energy monotonicity: v <= w implies E(v) <= E(w)") {
    std::mt19937_64 rng(11u);
    auto g = make_grid(1024, 2);
    const double tol = 25.0 * g.h() * g.h();
    for (int trial = 0; trial < 50; ++trial) {
        auto w = random_convex(rng, g);
        // v = w plus an extra convex decrease
        auto extra = random_convex(rng, g);
        std::vector<double> vv(g.n_points + 1);
        for (int i = 0; i <= g.n_points; ++i) vv[i] = w.value(i) + extra.value(i);
        radial_function v(g, std::move(vv), 0.0);
        double ev = energy_E0(v).value(), ew = energy_E0(w).value();
        CHECK(ev <= ew + tol * std::max(1.0, std::abs(ew)));
    }
}

TEST_CASE("exp integral: exact normalization, closed form, threshold") {
    for (int n : {1, 2}) {
        auto g = make_grid(2048, n);
        double kappa = 2.0 * n;
        auto mu = radial_measure::model(g, kappa);
        CHECK(exp_integral(radial_function::zero(g), 1.0, mu).value() ==
              doctest::Approx(1.0).epsilon(1e-12));

        // v = lambda t: closed form kappa / (kappa - gamma lambda)
        for (double lambda : {0.5, 1.0}) {
            for (double gamma : {0.5, 1.0}) {
                if (gamma * lambda >= kappa) continue;
                double want = kappa / (kappa - gamma * lambda);
                CHECK(exp_integral(linear(g, lambda), gamma, mu).value() ==
                      doctest::Approx(want).epsilon(1e-4));
            }
        }
        // integrability threshold: gamma * lelong >= kappa diverges
        CHECK(exp_integral(linear(g, 1.0), kappa, mu).is_pos_inf());
        CHECK(exp_integral(linear(g, 2.0), kappa / 2.0, mu).is_pos_inf());
        CHECK(exp_integral(linear(g, 1.0), kappa * (1 - 1e-9), mu).finite());
    }
}

TEST_CASE("exp integral scales linearly in the measure mass") {
    auto g = make_grid(512, 1);
    auto mu1 = radial_measure::model(g, 2.0, 1.0);
    auto muC = radial_measure::model(g, 2.0, 3.5);
    auto v = green_family(0.4, 0.1, g);
    double l1 = log_exp_integral(v, 1.2, mu1).value();
    double lC = log_exp_integral(v, 1.2, muC).value();
    CHECK(lC - l1 == doctest::Approx(std::log(3.5)).epsilon(1e-12));
}

TEST_CASE("ding functional: zero data and divergence propagation") {
    auto g = make_grid(512, 1);
    auto mu = radial_measure::model(g, 2.0);
    CHECK(ding_F(radial_function::zero(g), 1.0, mu).value() ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(ding_F(linear(g, 1.0), 2.5, mu), divergent_integral);
}

TEST_CASE("entropy: trivial cases and two-cell hand value") {
    auto g = make_grid(64, 1);
    auto mu = radial_measure::model(g, 2.0);
    CHECK(entropy_relative(mu, mu).value() == 0.0);

    // mu with two cells of mass 1/2; nu concentrated on one of them
    radial_measure two, nu;
    two.g = g;
    nu.g = g;
    two.cumulative.assign(65, 0.0);
    nu.cumulative.assign(65, 0.0);
    for (int i = 0; i <= 64; ++i) {
        two.cumulative[i] = i < 10 ? 0.0 : (i < 40 ? 0.5 : 1.0);
        nu.cumulative[i] = i < 10 ? 0.0 : 1.0;
    }
    CHECK(entropy_relative(nu, two).value() == doctest::Approx(std::log(2.0)));
    // nu charging a mu-null cell has infinite entropy
    radial_measure point;
    point.g = g;
    point.cumulative.assign(65, 1.0); // all mass in the tail cell
    CHECK(entropy_relative(point, two).is_pos_inf());

    auto g2 = make_grid(128, 1);
    CHECK_THROWS_AS(entropy_relative(nu, radial_measure::model(g2, 2.0)), grid_mismatch);
}

TEST_CASE("gibbs identity: int g dnu - H equals log Z exactly") {
    auto g = make_grid(512, 1);
    auto mu = radial_measure::model(g, 2.0);
    auto green = green_family(1.0, 0.1, g);
    std::vector<double> gv(g.n_points + 1);
    for (int i = 0; i <= g.n_points; ++i) gv[i] = -1.3 * green.value(i);
    auto gr = gibbs_measure(gv, mu);
    double lin = 0.0;
    for (int cell = 0; cell <= g.n_points; ++cell) {
        double mass = cell == 0 ? gr.nu.cumulative[0]
                                : gr.nu.cumulative[cell] - gr.nu.cumulative[cell - 1];
        double val = cell == 0 ? gv[0] : 0.5 * (gv[cell - 1] + gv[cell]);
        lin += mass * val;
    }
    double h = entropy_relative(gr.nu, mu).value();
    CHECK(lin - h == doctest::Approx(gr.log_z).epsilon(1e-12));
}

TEST_CASE("duality defect: trivial, strict, and Gibbs-saturated") {
    auto g = make_grid(4096, 1);
    auto mu = radial_measure::model(g, 2.0);
    std::vector<double> zero(g.n_points + 1, 0.0);
    CHECK(duality_defect(zero, mu, {mu}) == doctest::Approx(0.0).epsilon(1e-14));

    auto green = green_family(1.0, 0.1, g);
    std::vector<double> gv(g.n_points + 1);
    for (int i = 0; i <= g.n_points; ++i) gv[i] = -0.9 * green.value(i);
    CHECK(duality_defect(gv, mu, {mu}) > 0.0);
    auto gibbs = gibbs_measure(gv, mu).nu;
    double defect = duality_defect(gv, mu, {mu, gibbs});
    CHECK(std::abs(defect) <= 1e-8);
    // the sub-roundoff cell clamp in the entropy can push the defect a few
    // ulp-scale terms below zero
    CHECK(defect >= -1e-10);
}

TEST_CASE("csv round trip") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "ske_radial_csv_test";
    fs::create_directories(dir);
    auto g = make_grid(128, 2);
    auto v = green_family(0.9, 0.25, g);
    write_csv(dir / "v.csv", v);
    auto v2 = read_function_csv(dir / "v.csv");
    CHECK(v2.g() == v.g());
    CHECK(v2.lelong() == v.lelong());
    for (int i = 0; i <= g.n_points; ++i) CHECK(v2.value(i) == v.value(i));

    auto mu = radial_measure::model(g, 3.0);
    write_csv(dir / "mu.csv", mu);
    auto mu2 = read_measure_csv(dir / "mu.csv");
    CHECK(mu2.kappa.has_value());
    CHECK(*mu2.kappa == 3.0);
    for (int i = 0; i <= g.n_points; ++i) CHECK(mu2.cumulative[i] == mu.cumulative[i]);
    fs::remove_all(dir);
}
