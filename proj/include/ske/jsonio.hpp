#pragma once

#include <string>

#include "ske/lattice.hpp"

namespace ske::jsonio {

// Parses {"n": 2, "generators": [[2,0],[0,3]]}. 'what' names the source in
// diagnostics (typically the file path).
lattice::monomial_ideal ideal_from_json(const std::string& text,
                                        const std::string& what);

// Parses {"name":..., "n":..., "mult":..., "lct":..., "vol_hat":...,
// "discrepancies":[...], "kappa":...}.
lattice::singularity_profile profile_from_json(const std::string& text,
                                               const std::string& what);

std::string profile_to_json(const lattice::singularity_profile& p);

// Bound report as sorted-key JSON and as an aligned text table.
std::string bound_report_to_json(const lattice::bound_report& r);
std::string bound_report_to_table(const lattice::bound_report& r);

} // namespace ske::jsonio
