#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "ske/xreal.hpp"

namespace ske::radial {

// Uniform grid t_0 = t_min < ... < t_N = 0 in t = log|z|, with the model
// dimension attached. The tail t < t_min is handled analytically through
// the Lelong asymptote.
struct grid {
    double t_min = -20.0;
    int n_points = 2048; // N; nodes are indexed 0..N
    int dim = 1;         // complex dimension n of the model

    double h() const { return -t_min / n_points; }
    double node(int i) const {
        return t_min * static_cast<double>(n_points - i) / n_points;
    }
    bool operator==(const grid&) const = default;
    void validate() const;
};

// Rotation-invariant psh function as v(t) on the grid: convex, nondecreasing,
// v(0) = 0. 'lelong' is the asymptotic slope for t < t_min (the Lelong
// number scale of the log pole at p).
class radial_function {
public:
    radial_function() : radial_function(grid{}, std::vector<double>(2049, 0.0), 0.0) {}
    radial_function(grid g, std::vector<double> values, double lelong);

    static radial_function zero(const grid& g);

    const grid& g() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double value(int i) const { return values_[i]; }
    double lelong() const { return lelong_; }

    // Slope on cell j = (t_{j-1}, t_j], j = 1..N.
    double slope(int j) const {
        return (values_[j] - values_[j - 1]) / grid_.h();
    }
    // Midpoint value on cell j.
    double cell_mid(int j) const { return 0.5 * (values_[j - 1] + values_[j]); }

    double sup_norm() const;

private:
    grid grid_;
    std::vector<double> values_;
    double lelong_;
};

// Cumulative mass function M(t_i) on the grid. When 'kappa' is set the
// measure is the conical model mu_p with cumulative total * e^{kappa t}.
struct radial_measure {
    grid g;
    std::vector<double> cumulative; // size N+1, nondecreasing, >= 0
    std::optional<double> kappa;

    double total() const { return cumulative.back(); }
    double cell_mass(int j) const { return cumulative[j] - cumulative[j - 1]; }

    void validate() const;
    static radial_measure model(const grid& g, double kappa, double mass = 1.0);
};

// Monge-Ampere cumulative mass of v: M_0 = lelong^n (atom at p plus the flat
// analytic tail), M_j = slope(j)^n. Calibrated so v(t) = t has unit mass.
radial_measure ma_cumulative_mass(const radial_function& v);

// Monge-Ampere energy E_0(v) = 1/(n+1) * int v d[MA(v)], including the atom
// at p through the asymptote. Finite exactly when lelong = 0.
xreal energy_E0(const radial_function& v);

// log of int e^{-gamma v} dmu with the exact analytic tail below t_min.
// Returns +inf when gamma * lelong >= kappa (the radial integrability
// threshold); -inf for the zero measure.
xreal log_exp_integral(const radial_function& v, double gamma,
                       const radial_measure& mu);

// int e^{-gamma v} dmu itself; +inf also signals values beyond double range.
xreal exp_integral(const radial_function& v, double gamma,
                   const radial_measure& mu);

// Ding functional F_gamma(v) = E_0(v) + (1/gamma) log int e^{-gamma v} dmu.
// Throws divergent_integral when the exponential integral diverges.
xreal ding_F(const radial_function& v, double gamma, const radial_measure& mu);

// v(t) = lambda [log(e^{2t} + eps^2) - log(1 + eps^2)]. For eps = 0 this is
// the pure log pole 2 lambda t with Lelong slope 2 lambda.
radial_function green_family(double lambda, double eps, const grid& g);

// Relative entropy H_mu(nu) >= 0, computed cellwise with the tail cell
// (-inf, t_0] included; +inf when nu charges a mu-null cell.
xreal entropy_relative(const radial_measure& nu, const radial_measure& mu);

struct gibbs_result {
    radial_measure nu;
    double log_z = 0.0; // log int e^g dmu in the same cell convention
};

// Gibbs tilt e^g mu / int e^g dmu for node values g; the cell convention
// matches entropy_relative and duality_defect exactly.
gibbs_result gibbs_measure(const std::vector<double>& g_values,
                           const radial_measure& mu);

// log int e^g dmu - max over candidates of (int g dnu - H_mu(nu)).
// Nonnegative up to roundoff; ~0 when the Gibbs candidate is present.
double duality_defect(const std::vector<double>& g_values,
                      const radial_measure& mu,
                      const std::vector<radial_measure>& candidates);

// CSV serialization: header row with grid metadata, then (t,value) or
// (t,cumulative) rows.
void write_csv(const std::filesystem::path& path, const radial_function& v);
void write_csv(const std::filesystem::path& path, const radial_measure& mu);
radial_function read_function_csv(const std::filesystem::path& path);
radial_measure read_measure_csv(const std::filesystem::path& path);

} // namespace ske::radial
