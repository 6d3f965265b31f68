#pragma once

#include <utility>
#include <vector>

#include "ske/radial.hpp"

namespace ske::mt {

// Parameter design for the Moser-Trudinger scans: cone model (n, kappa),
// gamma bracket, lambda grid for the Green family, and the epsilon ladder.
struct scan_config {
    int n = 1;
    double kappa = 2.0;
    std::vector<double> gamma_bracket; // {lo, hi} for gamma-crit bisection
    std::vector<double> lambda_grid;
    std::vector<double> eps_ladder;    // strictly decreasing
    radial::grid g;

    static scan_config defaults(int n, double kappa, radial::grid g,
                                int eps_rungs = 14);
    void validate() const;
    radial::radial_measure model_measure() const;
};

struct slope_fit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
    std::vector<std::pair<double, double>> points; // (log eps^{-2}, observable)
};

// Moser-Trudinger defect (1/gamma) log int e^{-gamma v} dmu + E(v), with the
// energy taken in the calibration where the fundamental solution log|z|^2
// carries unit Monge-Ampere mass (E0 / 2^n). In that calibration the model
// measure has integrability threshold kappa/2 and the radial critical
// exponent is (n+1)/n * kappa/2.
xreal mt_defect(const radial::radial_function& v, double gamma,
                const radial::radial_measure& mu);

// Slope of log int e^{-gamma v_{lambda,eps}} dmu against log eps^{-2} for
// the Green family with log-coefficient lambda; the predicted value is
// (gamma lambda - kappa/2)_+.
slope_fit estlct_slope(double gamma, double lambda, const scan_config& cfg);

// Slope of -E0(v_{lambda',eps}) against log eps^{-2} for the Lelong-
// normalized family (point mass lambda'^n at eps = 0); the predicted value
// is lambda'^{n+1} / (2(n+1)).
slope_fit mult_slope(double lambda_prime, const scan_config& cfg);

struct gamma_crit_result {
    double gamma_est = 0.0;
    std::pair<double, double> window; // final bisection bracket
    double slope_at_lo = 0.0;
    double slope_at_hi = 0.0;
    double slope_threshold = 0.0;
    int bisections = 0;
};

// Bisection on gamma: supercritical iff the Green-family defect grows in
// log eps^{-2} (fitted slope above a fixed threshold on the last rungs).
gamma_crit_result gamma_crit_estimate(const scan_config& cfg);

struct coercivity_report {
    double gamma = 0.0;
    double slope_a = 0.0; // fitted coercivity slope
    double log_c = 0.0;   // additive constant (log C)
    int n_samples = 0;
    double sup_ratio = 0.0; // max of y/x over the sample; > 1 obstructs a < 1
    bool all_satisfied = false;
};

// Fits (a, log C) with (1/gamma) log int e^{-gamma v} dmu <= -a E(v) + log C
// over random admissible radial functions plus a Green subfamily.
coercivity_report coercivity_scan(double gamma, const scan_config& cfg,
                                  int samples);

struct scan_row {
    double gamma = 0.0, lambda = 0.0, eps = 0.0;
    double log_integral = 0.0, energy = 0.0, defect = 0.0;
};

// Full (gamma, lambda, eps) sweep for CSV emission. Parallel over tuples,
// capped by the SKE_THREADS environment variable.
std::vector<scan_row> defect_scan(const std::vector<double>& gammas,
                                  const scan_config& cfg);

} // namespace ske::mt
