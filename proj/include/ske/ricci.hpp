#pragma once

#include <utility>
#include <vector>

#include "ske/radial.hpp"

namespace ske::ricci {

struct iteration_config {
    double gamma = 1.0;
    radial::radial_measure mu;       // conical probability measure
    radial::radial_function initial; // default v = 0
    double tol_sup = 1e-9;
    int max_iter = 200;

    void validate() const;
};

enum class iteration_status { converged, max_iter_reached, diverged };

const char* to_string(iteration_status s);

struct iteration_trace {
    std::vector<radial::radial_function> iterates;
    std::vector<double> f_values;   // Ding functional per iterate
    std::vector<double> residuals;  // fixed-point residual per iterate
    std::vector<double> c_values;   // normalization constants c_j
    std::vector<double> sup_diffs;  // sup |v_{j+1} - v_j| per step
    iteration_status status = iteration_status::max_iter_reached;

    const radial::radial_function& final_iterate() const { return iterates.back(); }
};

// Closed-form radial Dirichlet solve: v(t) = -int_t^0 R(s)^{1/n} ds for the
// prescribed cumulative Monge-Ampere mass R. Exact inverse of
// ma_cumulative_mass on the grid.
radial::radial_function solve_dirichlet_radial(const radial::radial_measure& rhs,
                                               int n);

// One step of the inverse Ricci iteration: MA(v_next) = e^{-gamma v} mu / c.
// Returns the next iterate and c = int e^{-gamma v} dmu.
std::pair<radial::radial_function, double> ricci_step(
    const radial::radial_function& v, const iteration_config& cfg);

iteration_trace ricci_iterate(const iteration_config& cfg);

// sup over the grid of |MA(v) - Gibbs cumulative of v| (both cumulative
// mass functions, the residual of the fixed-point equation).
double fixed_point_residual(const radial::radial_function& v,
                            const iteration_config& cfg);

void write_trace_csv(const std::filesystem::path& path, const iteration_trace& t);

} // namespace ske::ricci
