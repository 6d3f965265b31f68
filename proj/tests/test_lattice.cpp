#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ske/errors.hpp"
#include "ske/lattice.hpp"

using namespace ske;
using namespace ske::lattice;
using ev = exponent_vector;

namespace {

monomial_ideal make2(std::vector<ev> gens) { return monomial_ideal::create(2, std::move(gens)); }

// ---------------------------------------------------------------------
// Integrability oracle for the log canonical threshold: the largest alpha
// with  int (sum |z^g|^2)^{-alpha} dV < infinity  near 0. Reduced to the
// radial cube in u_i = log r_i and detected by tail growth under cutoff
// doubling. Independent of the polyhedral code path.
// ---------------------------------------------------------------------

double integrand_sum(const monomial_ideal& I, const std::vector<double>& u) {
    double m = -1e300;
    for (const auto& g : I.generators) {
        double e = 0.0;
        for (int c = 0; c < I.n; ++c) e += 2.0 * g[c] * u[c];
        m = std::max(m, e);
    }
    // log(sum exp), adequate for a ratio test
    double s = 0.0;
    for (const auto& g : I.generators) {
        double e = 0.0;
        for (int c = 0; c < I.n; ++c) e += 2.0 * g[c] * u[c];
        s += std::exp(e - m);
    }
    return m + std::log(s);
}

double cube_integral(const monomial_ideal& I, double alpha, double T, double h) {
    // int over [-T,0]^n of (sum |z^g|^2)^{-alpha} * prod e^{2 u_i} du
    const int n = I.n;
    const int pts = static_cast<int>(std::lround(T / h));
    double total = 0.0;
    std::vector<int> idx(n, 0);
    std::vector<double> u(n);
    while (true) {
        for (int c = 0; c < n; ++c) u[c] = -T + (idx[c] + 0.5) * h;
        double lg = -alpha * integrand_sum(I, u);
        for (int c = 0; c < n; ++c) lg += 2.0 * u[c];
        total += std::exp(lg);
        int c = 0;
        while (c < n && ++idx[c] == pts) idx[c++] = 0;
        if (c == n) break;
    }
    return total * std::pow(h, n);
}

// Bisects on the cutoff-doubling growth of the integral. Matching grid
// spacing at both cutoffs isolates the tail contribution.
double lct_integrability_oracle(const monomial_ideal& I, double lo, double hi,
                                double T, double h) {
    for (int step = 0; step < 14; ++step) {
        double alpha = 0.5 * (lo + hi);
        double i1 = cube_integral(I, alpha, T, h);
        double i2 = cube_integral(I, alpha, 2.0 * T, h);
        bool divergent = (i2 - i1) > 0.10 * i1;
        if (divergent) hi = alpha; else lo = alpha;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------
// Independent 2-D covolume oracle: lower-left hull of the generators and
// an exact shoelace area of the complement polygon.
// ---------------------------------------------------------------------

rational covolume_shoelace_2d(const monomial_ideal& I) {
    REQUIRE(I.n == 2);
    auto gens = I.generators;
    std::sort(gens.begin(), gens.end());
    // Lower-left convex chain from (0, p_y) to (p_x, 0).
    std::vector<ev> chain;
    for (const auto& g : gens) {
        while (chain.size() >= 2) {
            const auto& a = chain[chain.size() - 2];
            const auto& b = chain[chain.size() - 1];
            long long cross = (b[0] - a[0]) * (g[1] - b[1]) - (b[1] - a[1]) * (g[0] - b[0]);
            // b above the segment a--g (right turn): not a hull vertex
            if (cross <= 0) chain.pop_back();
            else break;
        }
        chain.push_back(g);
    }
    // Polygon (0,0) -> (0, p_y) -> chain ... -> (p_x, 0) -> close.
    std::vector<std::pair<rational, rational>> poly;
    poly.emplace_back(rational(0), rational(0));
    for (const auto& g : chain) poly.emplace_back(rational(g[0]), rational(g[1]));
    rational area(0);
    const size_t m = poly.size();
    for (size_t i = 0; i < m; ++i) {
        const auto& [x1, y1] = poly[i];
        const auto& [x2, y2] = poly[(i + 1) % m];
        area += x1 * y2 - x2 * y1;
    }
    if (area < 0) area = -area;
    // raw shoelace sum = 2 * polygon area = n! * area for n = 2
    return area;
}

monomial_ideal random_primary_2d(std::mt19937_64& rng) {
    std::uniform_int_distribution<long long> p(1, 5);
    std::uniform_int_distribution<int> extra(0, 3);
    std::vector<ev> gens{{p(rng), 0}, {0, p(rng)}};
    int k = extra(rng);
    for (int i = 0; i < k; ++i) gens.push_back({p(rng), p(rng)});
    return make2(std::move(gens));
}

} // namespace

TEST_CASE("ideal construction validates and minimalizes") {
    auto I = make2({{2, 0}, {0, 3}, {2, 1}, {3, 3}});
    CHECK(I.generators.size() == 2); // (2,1) and (3,3) are redundant
    CHECK(I.pure_power(0) == 2);
    CHECK(I.pure_power(1) == 3);
    CHECK(I.contains({5, 0}));
    CHECK(!I.contains({1, 2}));
    CHECK_THROWS_AS(make2({{1, 0}, {1, 1}}), not_primary);
    CHECK_THROWS_AS(make2({{1, 0}, {0, -1}}), invalid_input);
    CHECK_THROWS_AS(monomial_ideal::create(0, {{}}), invalid_input);
}

TEST_CASE("newton polyhedron: maximal ideal in the plane") {
    auto np = compute_newton_polyhedron(make2({{1, 0}, {0, 1}}));
    REQUIRE(np.vertices.size() == 2);
    CHECK(np.vertices[0] == ev{0, 1});
    CHECK(np.vertices[1] == ev{1, 0});
    int nontrivial = 0;
    for (const auto& f : np.facets) {
        if (f.coordinate) continue;
        ++nontrivial;
        CHECK(f.w == std::vector<bigint>{1, 1});
        CHECK(f.c == 1);
    }
    CHECK(nontrivial == 1);
}

TEST_CASE("newton polyhedron: (x^2, y^3)") {
    auto np = compute_newton_polyhedron(make2({{2, 0}, {0, 3}}));
    REQUIRE(np.vertices.size() == 2);
    CHECK(np.vertices[0] == ev{0, 3});
    CHECK(np.vertices[1] == ev{2, 0});
    int nontrivial = 0;
    for (const auto& f : np.facets) {
        if (f.coordinate) continue;
        ++nontrivial;
        CHECK(f.w == std::vector<bigint>{3, 2});
        CHECK(f.c == 6);
    }
    CHECK(nontrivial == 1);
    // every generator satisfies all facet inequalities
    for (const auto& f : np.facets) {
        for (const auto& g : np.vertices) {
            bigint dot(0);
            for (size_t c = 0; c < f.w.size(); ++c) dot += f.w[c] * g[c];
            CHECK(dot >= f.c);
        }
    }
}

TEST_CASE("newton polyhedron: ODP-style squares have one nontrivial facet") {
    for (int n = 2; n <= 6; ++n) {
        std::vector<ev> gens;
        for (int i = 0; i < n; ++i) {
            ev g(n, 0);
            g[i] = 2;
            gens.push_back(g);
        }
        auto np = compute_newton_polyhedron(monomial_ideal::create(n, gens));
        int nontrivial = 0;
        for (const auto& f : np.facets) {
            if (f.coordinate) continue;
            ++nontrivial;
            for (const auto& wi : f.w) CHECK(wi == 1);
            CHECK(f.c == 2);
        }
        CHECK(nontrivial == 1);
        CHECK(np.vertices.size() == static_cast<size_t>(n));
    }
}

TEST_CASE("lct: stated values") {
    CHECK(lct_monomial(make2({{1, 0}, {0, 1}})) == rational(2));
    CHECK(lct_monomial(make2({{2, 0}, {0, 3}})) == rational(5, 6));
    auto I3 = monomial_ideal::create(3, {{2, 0, 0}, {0, 2, 0}, {0, 0, 2}});
    CHECK(lct_monomial(I3) == rational(3, 2));
}

TEST_CASE("lct: integrability oracle confirms the combinatorial value") {
    auto I = make2({{2, 0}, {0, 3}});
    double oracle = lct_integrability_oracle(I, 0.4, 1.4, 50.0, 0.1);
    CHECK(std::abs(oracle - 5.0 / 6.0) < 0.02);

    auto I3 = monomial_ideal::create(3, {{2, 0, 0}, {0, 2, 0}, {0, 0, 2}});
    double oracle3 = lct_integrability_oracle(I3, 1.0, 2.0, 24.0, 0.4);
    CHECK(std::abs(oracle3 - 1.5) < 0.05);
}

TEST_CASE("covolume: stated values") {
    CHECK(multiplicity_covolume(make2({{1, 0}, {0, 1}})) == rational(1));
    CHECK(multiplicity_covolume(make2({{2, 0}, {0, 3}})) == rational(6));
    auto m3 = monomial_ideal::create(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    CHECK(multiplicity_covolume(m3) == rational(1));
    // non complete intersection
    CHECK(multiplicity_covolume(make2({{3, 0}, {1, 1}, {0, 3}})) == rational(6));
    // 3-d staircase with a mixed generator
    auto I3 = monomial_ideal::create(3, {{2, 0, 0}, {0, 2, 0}, {0, 0, 2}, {1, 1, 1}});
    auto e = multiplicity_covolume(I3);
    CHECK(e > 0);
    CHECK(e <= rational(8)); // adding a generator can only shrink the complement
}

TEST_CASE("covolume agrees with the independent 2-D shoelace oracle") {
    std::mt19937_64 rng(91u);
    for (int trial = 0; trial < 40; ++trial) {
        auto I = random_primary_2d(rng);
        CHECK(multiplicity_covolume(I) == covolume_shoelace_2d(I));
    }
}

TEST_CASE("length oracle: stated values") {
    auto fit1 = multiplicity_length_oracle(make2({{1, 0}, {0, 1}}), 10);
    CHECK(std::abs(fit1.estimate - 1.0) < 0.05);
    auto fit2 = multiplicity_length_oracle(make2({{2, 0}, {0, 3}}), 40);
    CHECK(std::abs(fit2.estimate - 6.0) < 0.05);
    auto fit3 = multiplicity_length_oracle(make2({{2, 0}, {0, 2}}), 40);
    CHECK(std::abs(fit3.estimate - 4.0) < 0.05);
    CHECK_THROWS_AS(multiplicity_length_oracle(make2({{1, 0}, {0, 1}}), 2), invalid_input);
}

TEST_CASE("length counts: small hand values") {
    // l(O/I) for I = (x^2, y^3) is the 2x3 box; l(O/m^2) = 3.
    auto fit = multiplicity_length_oracle(make2({{2, 0}, {0, 3}}), 10);
    CHECK(fit.lengths[0] == 6);
    auto m2 = make2({{1, 0}, {0, 1}}).power(2);
    auto fitm = multiplicity_length_oracle(m2, 10);
    CHECK(fitm.lengths[0] == 3);
}

TEST_CASE("scaling: lct(I^k) = lct(I)/k and e(I^k) = k^n e(I), exactly") {
    std::mt19937_64 rng(17u);
    for (int trial = 0; trial < 12; ++trial) {
        auto I = random_primary_2d(rng);
        rational l = lct_monomial(I), e = multiplicity_covolume(I);
        for (int k : {2, 3}) {
            auto Ik = I.power(k);
            CHECK(lct_monomial(Ik) == l / k);
            CHECK(multiplicity_covolume(Ik) == e * pow_int(bigint(k), 2));
        }
    }
}

TEST_CASE("monotonicity: I inside J implies lct(I) <= lct(J)") {
    std::mt19937_64 rng(29u);
    std::uniform_int_distribution<long long> off(0, 2);
    for (int trial = 0; trial < 30; ++trial) {
        auto J = random_primary_2d(rng);
        std::vector<ev> raised;
        for (const auto& g : J.generators) {
            ev r = g;
            bool pure_x = (g[1] == 0), pure_y = (g[0] == 0);
            if (pure_x) r[0] += off(rng);
            else if (pure_y) r[1] += off(rng);
            else { r[0] += off(rng); r[1] += off(rng); }
            raised.push_back(r);
        }
        auto I = make2(std::move(raised));
        for (const auto& g : I.generators) CHECK(J.contains(g));
        CHECK(lct_monomial(I) <= lct_monomial(J));
    }
}

TEST_CASE("lct^n * e >= n^n on every m-primary ideal (normalized volume bound)") {
    std::mt19937_64 rng(47u);
    for (int trial = 0; trial < 40; ++trial) {
        auto I = random_primary_2d(rng);
        rational liu = pow_rat(lct_monomial(I), 2) * multiplicity_covolume(I);
        CHECK(liu >= rational(4));
    }
    // equality at the maximal ideal
    CHECK(pow_rat(lct_monomial(make2({{1, 0}, {0, 1}})), 2) *
              multiplicity_covolume(make2({{1, 0}, {0, 1}})) ==
          rational(4));
}

TEST_CASE("ak valuation data: closed-form checks") {
    for (int n = 2; n <= 6; ++n) {
        auto d = ak_valuation_data(n, 1, 1.0);
        CHECK(d.log_discrepancy == doctest::Approx(n - 1.0).epsilon(1e-15));
        CHECK(d.volume == doctest::Approx(2.0).epsilon(1e-15));
    }
    auto d = ak_valuation_data(3, 3, 0.5);
    CHECK(d.log_discrepancy == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(d.volume == doctest::Approx(4.0).epsilon(1e-15));
    // w0 -> 0+: the min branch gives vol = k+1 exactly
    auto d0 = ak_valuation_data(4, 5, 1e-4);
    CHECK(d0.volume == doctest::Approx(6.0).epsilon(1e-12));
    CHECK_THROWS_AS(ak_valuation_data(3, 2, -1.0), invalid_input);
}

TEST_CASE("normalized volume search: smooth case returns n^n with equal weights") {
    for (int n : {2, 3, 4}) {
        auto r = normalized_volume_smooth(n, 1e-8);
        CHECK(std::abs(r.vol_hat - std::pow(double(n), n)) < 1e-6 * std::pow(double(n), n));
        for (double w : r.argmin.weights) CHECK(std::abs(w - 1.0) < 1e-4);
    }
}

TEST_CASE("normalized volume search: A_k matches the correct branch") {
    for (int n : {2, 3, 4, 6}) {
        for (int k : {1, 2, 3, 9}) {
            auto r = normalized_volume_ak(n, k, 1e-9);
            double want = ak_vol_hat_closed_form(n, k);
            CHECK(std::abs(r.vol_hat - want) < 1e-6 * want);
            // argmin matches the branch analysis
            const bool first_branch = (n > 2) && ((k + 1) * (n - 2) >= 2 * (n - 1));
            double w0_want = first_branch ? double(n - 2) / (n - 1) : 2.0 / (k + 1);
            CHECK(std::abs(r.argmin.weights[0] - w0_want) < 1e-4);
        }
    }
    // ODP datum: ak(3,1) -> 16
    CHECK(normalized_volume_ak(3, 1, 1e-9).vol_hat == doctest::Approx(16.0).epsilon(1e-9));
}

TEST_CASE("bounds report: ODP profile numbers") {
    singularity_profile p;
    p.name = "ODP";
    p.n = 3;
    p.mult = 2;
    p.lct = 2.0;
    p.vol_hat = 16.0;
    p.discrepancies = {1.0};
    p.kappa = 4.0;
    auto r = bounds_report(p);
    const double cbrt2 = std::cbrt(2.0);
    CHECK(r.alpha_lower_mult_lct == doctest::Approx(3.0 / std::pow(2.0, 2.0 / 3.0) * (2.0 / 3.0)));
    CHECK(r.alpha_lower_volume == doctest::Approx(std::cbrt(16.0) / 2.0));
    CHECK(r.alpha_lower == doctest::Approx(cbrt2));
    CHECK(r.alpha_upper == doctest::Approx(std::cbrt(16.0)));
    CHECK(r.gamma_upper == doctest::Approx(4.0 / 3.0 * std::cbrt(16.0)));
    CHECK(r.integrability_sup == doctest::Approx(3.0));
    CHECK(!r.admissible);
}

TEST_CASE("bounds report: smooth profile collapses the window") {
    singularity_profile p;
    p.name = "smooth";
    p.n = 3;
    p.mult = 1;
    p.lct = 3.0;
    p.vol_hat = 27.0;
    p.discrepancies = {0.0};
    p.kappa = 6.0;
    auto r = bounds_report(p);
    CHECK(r.alpha_lower == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(r.alpha_upper == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(r.alpha_exact);
    CHECK(std::abs(r.gamma_upper - r.gamma_lower) < 1e-12);
    CHECK(r.gamma_upper == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("bounds report: admissible profile pins alpha to vol^(1/n)") {
    singularity_profile p;
    p.name = "A2_surface";
    p.n = 2;
    p.mult = 2;
    p.lct = 2.0 / 3.0;
    p.vol_hat = 4.0 / 3.0;
    p.discrepancies = {0.0, 0.0};
    p.kappa = 4.0 / 3.0;
    auto r = bounds_report(p);
    CHECK(r.admissible);
    CHECK(r.alpha_lower == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-14));
    CHECK(r.alpha_exact);
}

TEST_CASE("bounds report: inconsistent profile is rejected") {
    singularity_profile p;
    p.name = "bogus";
    p.n = 3;
    p.mult = 1;
    p.lct = 3.0;
    p.vol_hat = 1e-3;
    p.discrepancies = {0.0};
    p.kappa = 6.0;
    CHECK_THROWS_AS(bounds_report(p), inconsistent_profile);
}

TEST_CASE("builtin profile corpus is valid and consistent") {
    auto corpus = builtin_profiles();
    CHECK(corpus.size() >= 15);
    for (const auto& p : corpus) {
        p.validate();
        auto r = bounds_report(p);
        CHECK(r.alpha_lower <= r.alpha_upper + 1e-12);
    }
}
