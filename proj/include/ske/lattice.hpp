#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ske/rational.hpp"

namespace ske::lattice {

using exponent_vector = std::vector<long long>;

// m-primary monomial ideal given by a minimal generating set (an antichain
// under componentwise divisibility). Construction validates m-primarity:
// every coordinate axis must carry a pure-power generator.
struct monomial_ideal {
    int n = 0;
    std::vector<exponent_vector> generators;

    static monomial_ideal create(int n, std::vector<exponent_vector> gens);

    // Staircase membership: x lies above some generator.
    bool contains(const exponent_vector& x) const;

    // Exponent of the pure power on the given axis.
    long long pure_power(int axis) const;

    // k-th power of the ideal (generators = k-fold sums, minimalized).
    monomial_ideal power(int k) const;
};

// One inequality <w, x> >= c with w >= 0 primitive integer. Coordinate
// facets are the x_i >= 0 walls (c = 0).
struct facet {
    std::vector<bigint> w;
    bigint c;
    bool coordinate = false;
};

struct newton_polyhedron {
    int n = 0;
    std::vector<exponent_vector> vertices;
    std::vector<facet> facets; // nontrivial facets first, then coordinate walls
};

newton_polyhedron compute_newton_polyhedron(const monomial_ideal& ideal);

// Log canonical threshold: min over nontrivial facets of <w, 1>/c.
rational lct_monomial(const monomial_ideal& ideal);

// Hilbert-Samuel multiplicity as n! * vol(orthant \ P(I)), exact.
rational multiplicity_covolume(const monomial_ideal& ideal);

struct length_fit {
    double estimate = 0.0;           // fitted multiplicity
    double spread = 0.0;             // max deviation across the fit windows
    std::vector<long long> lengths;  // l(O/I^m) for m = 1..m_max
};

// Counts monomials outside I^m for m = 1..m_max and fits the degree-n
// leading coefficient. Independent oracle for multiplicity_covolume.
length_fit multiplicity_length_oracle(const monomial_ideal& ideal, int m_max);

// Quasi-monomial valuation data on the A_k hypersurface
// {z_0^{k+1} + z_1^2 + ... + z_n^2 = 0} with weights (w0, 1, ..., 1).
struct ak_data {
    double log_discrepancy = 0.0; // A
    double volume = 0.0;          // vol
};
ak_data ak_valuation_data(int n, int k, double w0);

struct monomial_valuation {
    std::vector<double> weights;
};

struct volhat_result {
    double vol_hat = 0.0;
    monomial_valuation argmin;
};

// Minimizes (sum w)^n / prod w over positive weights; must return n^n.
volhat_result normalized_volume_smooth(int n, double tol);

// Minimizes A^n * vol over w0 > 0 for the A_k family (golden section on
// log w0; the objective has a single kink at (k+1) w0 = 2).
volhat_result normalized_volume_ak(int n, int k, double tol);

// Closed-form normalized volume of the A_k singularity (both branches).
double ak_vol_hat_closed_form(int n, int k);

struct singularity_profile {
    std::string name;
    int n = 0;
    long long mult = 0;
    double lct = 0.0;
    double vol_hat = 0.0;
    std::vector<double> discrepancies;
    double kappa = 0.0; // radial cone exponent used by the radial model

    void validate() const;
};

struct bound_report {
    singularity_profile profile;
    double alpha_lower_mult_lct = 0.0; // n / mult^{1-1/n} * lct/(1+lct)
    double alpha_lower_volume = 0.0;   // vol_hat^{1/n} / (1 + (max a_i)_+)
    double alpha_lower = 0.0;          // max of the two
    double alpha_upper = 0.0;          // vol_hat^{1/n}
    double alpha_tilde = 0.0;          // vol_hat^{1/n} (separate row)
    bool admissible = false;           // all discrepancies <= 0
    bool alpha_exact = false;          // lower == upper
    double gamma_lower = 0.0;          // (n+1)/n * alpha_lower
    double gamma_upper = 0.0;          // (n+1)/n * alpha_upper
    double integrability_sup = 0.0;    // density in L^r for r < 1 + lct
};

bound_report bounds_report(const singularity_profile& p);

// Built-in profile corpus: smooth points, ODP family, A_k family.
std::vector<singularity_profile> builtin_profiles();

} // namespace ske::lattice
