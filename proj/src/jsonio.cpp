#include "ske/jsonio.hpp"

#include <json.hpp>

#include "ske/errors.hpp"
#include "ske/io.hpp"

namespace ske::jsonio {

using nlohmann::json;

namespace {

json parse(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw invalid_input(what + ": malformed JSON");
    return j;
}

} // namespace

lattice::monomial_ideal ideal_from_json(const std::string& text,
                                        const std::string& what) {
    json j = parse(text, what);
    if (!j.is_object() || !j.contains("n") || !j.contains("generators"))
        throw invalid_input(what + ": expected {\"n\", \"generators\"}");
    if (!j["n"].is_number_integer())
        throw invalid_input(what + ": \"n\" must be an integer");
    int n = j["n"].get<int>();
    if (!j["generators"].is_array())
        throw invalid_input(what + ": \"generators\" must be an array");
    std::vector<lattice::exponent_vector> gens;
    for (const auto& row : j["generators"]) {
        if (!row.is_array()) throw invalid_input(what + ": generator must be an array");
        lattice::exponent_vector g;
        for (const auto& e : row) {
            if (!e.is_number_integer())
                throw invalid_input(what + ": exponents must be integers");
            g.push_back(e.get<long long>());
        }
        gens.push_back(std::move(g));
    }
    return lattice::monomial_ideal::create(n, std::move(gens));
}

lattice::singularity_profile profile_from_json(const std::string& text,
                                               const std::string& what) {
    json j = parse(text, what);
    for (const char* key : {"name", "n", "mult", "lct", "vol_hat", "discrepancies", "kappa"})
        if (!j.contains(key))
            throw invalid_input(what + ": profile missing \"" + key + "\"");
    lattice::singularity_profile p;
    try {
        p.name = j["name"].get<std::string>();
        p.n = j["n"].get<int>();
        p.mult = j["mult"].get<long long>();
        p.lct = j["lct"].get<double>();
        p.vol_hat = j["vol_hat"].get<double>();
        p.discrepancies = j["discrepancies"].get<std::vector<double>>();
        p.kappa = j["kappa"].get<double>();
    } catch (const json::exception&) {
        throw invalid_input(what + ": profile field has wrong type");
    }
    p.validate();
    return p;
}

std::string profile_to_json(const lattice::singularity_profile& p) {
    json j;
    j["name"] = p.name;
    j["n"] = p.n;
    j["mult"] = p.mult;
    j["lct"] = p.lct;
    j["vol_hat"] = p.vol_hat;
    j["discrepancies"] = p.discrepancies;
    j["kappa"] = p.kappa;
    return j.dump(2);
}

std::string bound_report_to_json(const lattice::bound_report& r) {
    json j;
    j["profile"] = json::parse(profile_to_json(r.profile));
    j["alpha_lower_mult_lct"] = r.alpha_lower_mult_lct;
    j["alpha_lower_volume"] = r.alpha_lower_volume;
    j["alpha_lower"] = r.alpha_lower;
    j["alpha_upper"] = r.alpha_upper;
    j["alpha_tilde"] = r.alpha_tilde;
    j["admissible"] = r.admissible;
    j["alpha_exact"] = r.alpha_exact;
    j["gamma_crit_lower"] = r.gamma_lower;
    j["gamma_crit_upper"] = r.gamma_upper;
    j["integrability_sup"] = r.integrability_sup;
    return j.dump(2);
}

std::string bound_report_to_table(const lattice::bound_report& r) {
    using io::fmt_double;
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"alpha lower (mult/lct)", fmt_double(r.alpha_lower_mult_lct)});
    rows.push_back({"alpha lower (volume)", fmt_double(r.alpha_lower_volume)});
    rows.push_back({"alpha lower", fmt_double(r.alpha_lower)});
    rows.push_back({"alpha upper = vol^(1/n)", fmt_double(r.alpha_upper)});
    rows.push_back({"alpha tilde", fmt_double(r.alpha_tilde)});
    rows.push_back({"admissible", r.admissible ? "yes" : "no"});
    rows.push_back({"alpha pinned exactly", r.alpha_exact ? "yes" : "no"});
    rows.push_back({"gamma_crit lower", fmt_double(r.gamma_lower)});
    rows.push_back({"gamma_crit upper", fmt_double(r.gamma_upper)});
    rows.push_back({"density L^r for r <", fmt_double(r.integrability_sup)});
    return io::text_table({"quantity [" + r.profile.name + "]", "value"}, rows);
}

} // namespace ske::jsonio
