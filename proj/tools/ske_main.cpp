// ske: singularity invariants and a radial Monge-Ampere laboratory.
//
// Subcommands: invariants, volhat, bounds, ricci, mt-scan, gamma-crit,
// selftest. All machine outputs use shortest-round-trip floats and sorted
// JSON keys so identical inputs give byte-identical files.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>

#include "ske/acceptance.hpp"
#include "ske/errors.hpp"
#include "ske/io.hpp"
#include "ske/jsonio.hpp"
#include "ske/lattice.hpp"
#include "ske/mt.hpp"
#include "ske/radial.hpp"
#include "ske/ricci.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

ske::radial::grid make_grid(double t_min, int N, int dim) {
    ske::radial::grid g;
    g.t_min = t_min;
    g.n_points = N;
    g.dim = dim;
    g.validate();
    return g;
}

void emit(const fs::path& out_dir, const std::string& name, const std::string& content,
          bool to_stdout) {
    if (to_stdout) {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') std::cout << '\n';
    } else {
        fs::path p = out_dir / name;
        ske::io::atomic_write(p, content);
        std::cout << "wrote " << p.string() << "\n";
    }
}

int cmd_invariants(const std::string& ideal_file, const fs::path& out_dir, bool as_json) {
    auto ideal = ske::jsonio::ideal_from_json(ske::io::read_file(ideal_file), ideal_file);
    auto np = ske::lattice::compute_newton_polyhedron(ideal);
    auto lct = ske::lattice::lct_monomial(ideal);
    auto mult = ske::lattice::multiplicity_covolume(ideal);
    auto liu = ske::pow_rat(lct, static_cast<unsigned>(ideal.n)) * mult;

    json j;
    j["n"] = ideal.n;
    j["generators"] = json::array();
    for (const auto& g : ideal.generators) j["generators"].push_back(g);
    j["lct"] = ske::to_string(lct);
    j["lct_double"] = ske::to_double(lct);
    j["multiplicity"] = ske::to_string(mult);
    j["multiplicity_double"] = ske::to_double(mult);
    j["lct_n_times_e"] = ske::to_string(liu);
    j["lct_n_times_e_double"] = ske::to_double(liu);
    j["vertices"] = json::array();
    for (const auto& v : np.vertices) j["vertices"].push_back(v);
    j["facets"] = json::array();
    for (const auto& f : np.facets) {
        json jf;
        jf["w"] = json::array();
        for (const auto& wi : f.w) jf["w"].push_back(wi.str());
        jf["c"] = f.c.str();
        jf["coordinate"] = f.coordinate;
        j["facets"].push_back(jf);
    }
    emit(out_dir, "invariants.json", j.dump(2) + "\n", as_json);
    return 0;
}

int cmd_volhat(int smooth_n, int ak_n, int ak_k, double tol, const fs::path& out_dir,
               bool as_json) {
    json j;
    if (smooth_n > 0) {
        auto r = ske::lattice::normalized_volume_smooth(smooth_n, tol);
        j["kind"] = "smooth";
        j["n"] = smooth_n;
        j["vol_hat"] = r.vol_hat;
        j["vol_hat_nth_root"] = std::pow(r.vol_hat, 1.0 / smooth_n);
        j["argmin_weights"] = r.argmin.weights;
    } else {
        auto r = ske::lattice::normalized_volume_ak(ak_n, ak_k, tol);
        j["kind"] = "ak";
        j["n"] = ak_n;
        j["k"] = ak_k;
        j["vol_hat"] = r.vol_hat;
        j["vol_hat_nth_root"] = std::pow(r.vol_hat, 1.0 / ak_n);
        j["closed_form"] = ske::lattice::ak_vol_hat_closed_form(ak_n, ak_k);
        j["argmin_weights"] = r.argmin.weights;
    }
    emit(out_dir, "volhat.json", j.dump(2) + "\n", as_json);
    return 0;
}

int cmd_bounds(const std::string& profile_file, const fs::path& out_dir, bool as_json) {
    auto profile =
        ske::jsonio::profile_from_json(ske::io::read_file(profile_file), profile_file);
    auto report = ske::lattice::bounds_report(profile);
    if (as_json) {
        std::cout << ske::jsonio::bound_report_to_json(report) << "\n";
    } else {
        ske::io::atomic_write(out_dir / "bounds.json",
                              ske::jsonio::bound_report_to_json(report) + "\n");
        std::cout << ske::jsonio::bound_report_to_table(report);
        std::cout << "wrote " << (out_dir / "bounds.json").string() << "\n";
    }
    return 0;
}

int cmd_ricci(int n, double kappa, double gamma, double t_min, int grid_n, double tol,
              int max_iter, bool expect_converged, bool dump_iterates,
              const fs::path& out_dir, bool as_json) {
    auto g = make_grid(t_min, grid_n, n);
    ske::ricci::iteration_config cfg;
    cfg.gamma = gamma;
    cfg.mu = ske::radial::radial_measure::model(g, kappa);
    cfg.initial = ske::radial::radial_function::zero(g);
    cfg.tol_sup = tol;
    cfg.max_iter = max_iter;
    auto tr = ske::ricci::ricci_iterate(cfg);

    json j;
    j["n"] = n;
    j["kappa"] = kappa;
    j["gamma"] = gamma;
    j["grid_N"] = grid_n;
    j["t_min"] = t_min;
    j["status"] = ske::ricci::to_string(tr.status);
    j["iterations"] = tr.iterates.size();
    if (!tr.f_values.empty()) {
        j["final_F"] = tr.f_values.back();
        j["final_residual"] = tr.residuals.back();
        j["final_c"] = tr.c_values.back();
    }
    if (as_json) {
        std::cout << j.dump(2) << "\n";
    } else {
        ske::ricci::write_trace_csv(out_dir / "trace.csv", tr);
        ske::io::atomic_write(out_dir / "ricci.json", j.dump(2) + "\n");
        if (dump_iterates && !tr.iterates.empty()) {
            for (size_t i = 0; i < tr.iterates.size(); ++i)
                ske::radial::write_csv(out_dir / ("iterate_" + std::to_string(i) + ".csv"),
                                       tr.iterates[i]);
        }
        std::cout << "status " << ske::ricci::to_string(tr.status) << ", wrote "
                  << (out_dir / "trace.csv").string() << "\n";
    }
    if (expect_converged && tr.status != ske::ricci::iteration_status::converged) {
        std::cerr << "error: iteration did not converge (status "
                  << ske::ricci::to_string(tr.status) << ")\n";
        return 2;
    }
    return 0;
}

int cmd_mt_scan(int n, double kappa, std::vector<double> gammas,
                std::vector<double> lambdas, int eps_rungs, double t_min, int grid_n,
                const fs::path& out_dir, bool as_json) {
    auto cfg = ske::mt::scan_config::defaults(n, kappa, make_grid(t_min, grid_n, n),
                                              eps_rungs);
    if (!lambdas.empty()) cfg.lambda_grid = lambdas;
    if (gammas.empty()) gammas = {0.5 * (n + 1.0) / n * kappa / 2.0};
    auto rows = ske::mt::defect_scan(gammas, cfg);

    std::ostringstream csv;
    csv << "gamma,lambda,eps,log_integral,energy,defect\n";
    for (const auto& r : rows) {
        csv << ske::io::fmt_double(r.gamma) << ',' << ske::io::fmt_double(r.lambda) << ','
            << ske::io::fmt_double(r.eps) << ',' << ske::io::fmt_double(r.log_integral)
            << ',' << ske::io::fmt_double(r.energy) << ','
            << ske::io::fmt_double(r.defect) << '\n';
    }
    json j;
    j["n"] = n;
    j["kappa"] = kappa;
    j["gammas"] = gammas;
    j["estlct_fits"] = json::array();
    for (double gamma : gammas) {
        for (double lambda : cfg.lambda_grid) {
            json jj;
            jj["gamma"] = gamma;
            jj["lambda"] = lambda;
            jj["predicted"] = std::max(gamma * lambda - kappa / 2.0, 0.0);
            try {
                auto fit = ske::mt::estlct_slope(gamma, lambda, cfg);
                jj["slope"] = fit.slope;
                jj["r2"] = fit.r2;
                jj["poor_fit"] = false;
            } catch (const ske::poor_fit&) {
                jj["poor_fit"] = true;
            }
            j["estlct_fits"].push_back(jj);
        }
    }
    j["mult_fits"] = json::array();
    for (double lambda : cfg.lambda_grid) {
        json jj;
        jj["lambda"] = lambda;
        jj["predicted"] = std::pow(lambda, n + 1) / (2.0 * (n + 1));
        try {
            auto fit = ske::mt::mult_slope(lambda, cfg);
            jj["slope"] = fit.slope;
            jj["r2"] = fit.r2;
            jj["poor_fit"] = false;
        } catch (const ske::poor_fit&) {
            jj["poor_fit"] = true;
        }
        j["mult_fits"].push_back(jj);
    }
    if (as_json) {
        std::cout << j.dump(2) << "\n";
    } else {
        ske::io::atomic_write(out_dir / "mt_scan.csv", csv.str());
        ske::io::atomic_write(out_dir / "mt_fits.json", j.dump(2) + "\n");
        std::cout << "wrote " << (out_dir / "mt_scan.csv").string() << " and "
                  << (out_dir / "mt_fits.json").string() << "\n";
    }
    return 0;
}

int cmd_gamma_crit(int n, double kappa, double t_min, int grid_n, int eps_rungs,
                   double bracket_lo, double bracket_hi, const fs::path& out_dir,
                   bool as_json) {
    auto cfg = ske::mt::scan_config::defaults(n, kappa, make_grid(t_min, grid_n, n),
                                              eps_rungs);
    if (bracket_lo > 0.0 && bracket_hi > bracket_lo)
        cfg.gamma_bracket = {bracket_lo, bracket_hi};
    auto res = ske::mt::gamma_crit_estimate(cfg);
    json j;
    j["n"] = n;
    j["kappa"] = kappa;
    j["gamma_est"] = res.gamma_est;
    j["window"] = {res.window.first, res.window.second};
    j["slope_threshold"] = res.slope_threshold;
    j["slope_at_bracket_lo"] = res.slope_at_lo;
    j["slope_at_bracket_hi"] = res.slope_at_hi;
    j["bisections"] = res.bisections;
    emit(out_dir, "gamma_crit.json", j.dump(2) + "\n", as_json);
    return 0;
}

int cmd_selftest(bool as_json) {
    auto results = ske::acceptance::run_all(ske::acceptance::settings::selftest());
    bool all = true;
    json j = json::array();
    for (const auto& r : results) {
        all = all && r.pass;
        if (as_json) {
            json jr;
            jr["id"] = r.id;
            jr["name"] = r.name;
            jr["pass"] = r.pass;
            jr["detail"] = r.detail;
            jr["seconds"] = r.seconds;
            j.push_back(jr);
        } else {
            std::cout << (r.pass ? "PASS" : "FAIL") << "  C" << r.id << "  " << r.name;
            if (!r.pass) std::cout << "  [" << r.detail << "]";
            std::cout << "  (" << ske::io::fmt_double(r.seconds) << " s)\n";
        }
    }
    if (as_json) std::cout << j.dump(2) << "\n";
    return all ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"singularity invariants and radial Monge-Ampere laboratory"};
    app.require_subcommand(1);
    app.fallthrough(); // --out / --json may follow the subcommand

    std::string out_dir = ".";
    bool as_json = false;
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_flag("--json", as_json, "print machine-readable result to stdout");

    // invariants
    auto* inv = app.add_subcommand("invariants", "lct, multiplicity and Newton polyhedron");
    std::string ideal_file;
    inv->add_option("--ideal", ideal_file, "ideal JSON file")->required();

    // volhat
    auto* vh = app.add_subcommand("volhat", "normalized volume search");
    int smooth_n = 0, ak_n = 0, ak_k = 0;
    double vh_tol = 1e-9;
    std::vector<int> ak_pair;
    vh->add_option("--smooth", smooth_n, "smooth point of dimension n");
    vh->add_option("--ak", ak_pair, "A_k case: n k")->expected(2);
    vh->add_option("--tol", vh_tol, "search tolerance")->capture_default_str();

    // bounds
    auto* bd = app.add_subcommand("bounds", "alpha / gamma_crit bound chain for a profile");
    std::string profile_file;
    bd->add_option("--profile", profile_file, "profile JSON file")->required();

    // ricci
    auto* rc = app.add_subcommand("ricci", "Ricci inverse iteration on the cone model");
    int rc_n = 1, rc_grid = 2048, rc_max_iter = 2000;
    double rc_kappa = 2.0, rc_gamma = 1.0, rc_tmin = -20.0, rc_tol = 1e-9;
    bool rc_expect = false, rc_dump = false;
    rc->add_option("--n", rc_n, "complex dimension")->required();
    rc->add_option("--kappa", rc_kappa, "cone exponent of mu")->required();
    rc->add_option("--gamma", rc_gamma, "curvature parameter")->required();
    rc->add_option("--tmin", rc_tmin, "grid left end")->capture_default_str();
    rc->add_option("--grid", rc_grid, "grid points N")->capture_default_str();
    rc->add_option("--tol", rc_tol, "sup-norm stopping tolerance")->capture_default_str();
    rc->add_option("--max-iter", rc_max_iter, "iteration cap")->capture_default_str();
    rc->add_flag("--expect-converged", rc_expect, "exit 2 unless converged");
    rc->add_flag("--dump-iterates", rc_dump, "write per-iterate CSV files");

    // mt-scan
    auto* ms = app.add_subcommand("mt-scan", "Moser-Trudinger defect sweep and slope fits");
    int ms_n = 1, ms_grid = 2048, ms_rungs = 14;
    double ms_kappa = 2.0, ms_tmin = -20.0;
    std::vector<double> ms_gammas, ms_lambdas;
    ms->add_option("--n", ms_n, "complex dimension")->required();
    ms->add_option("--kappa", ms_kappa, "cone exponent")->required();
    ms->add_option("--gamma", ms_gammas, "gamma values (repeatable)");
    ms->add_option("--lambda", ms_lambdas, "lambda grid override (repeatable)");
    ms->add_option("--eps-rungs", ms_rungs, "epsilon ladder length")->capture_default_str();
    ms->add_option("--tmin", ms_tmin, "grid left end")->capture_default_str();
    ms->add_option("--grid", ms_grid, "grid points N")->capture_default_str();

    // gamma-crit
    auto* gc = app.add_subcommand("gamma-crit", "critical exponent by defect bisection");
    int gc_n = 1, gc_grid = 2048, gc_rungs = 14;
    double gc_kappa = 2.0, gc_tmin = -20.0, gc_lo = 0.0, gc_hi = 0.0;
    gc->add_option("--n", gc_n, "complex dimension")->required();
    gc->add_option("--kappa", gc_kappa, "cone exponent")->required();
    gc->add_option("--tmin", gc_tmin, "grid left end")->capture_default_str();
    gc->add_option("--grid", gc_grid, "grid points N")->capture_default_str();
    gc->add_option("--eps-rungs", gc_rungs, "epsilon ladder length")->capture_default_str();
    gc->add_option("--bracket-lo", gc_lo, "gamma bracket lower end");
    gc->add_option("--bracket-hi", gc_hi, "gamma bracket upper end");

    // selftest
    app.add_subcommand("selftest", "acceptance suite at reduced resolution");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1; // flag/argument validation error
    }

    try {
        fs::path out(out_dir);
        if (inv->parsed()) return cmd_invariants(ideal_file, out, as_json);
        if (vh->parsed()) {
            if ((smooth_n > 0) == !ak_pair.empty())
                throw ske::invalid_input("volhat: pass exactly one of --smooth or --ak");
            if (!ak_pair.empty()) {
                ak_n = ak_pair[0];
                ak_k = ak_pair[1];
            }
            return cmd_volhat(smooth_n, ak_n, ak_k, vh_tol, out, as_json);
        }
        if (bd->parsed()) return cmd_bounds(profile_file, out, as_json);
        if (rc->parsed())
            return cmd_ricci(rc_n, rc_kappa, rc_gamma, rc_tmin, rc_grid, rc_tol,
                             rc_max_iter, rc_expect, rc_dump, out, as_json);
        if (ms->parsed())
            return cmd_mt_scan(ms_n, ms_kappa, ms_gammas, ms_lambdas, ms_rungs, ms_tmin,
                               ms_grid, out, as_json);
        if (gc->parsed())
            return cmd_gamma_crit(gc_n, gc_kappa, gc_tmin, gc_grid, gc_rungs, gc_lo,
                                  gc_hi, out, as_json);
        if (app.get_subcommand("selftest")->parsed()) return cmd_selftest(as_json);
        throw ske::invalid_input("no subcommand");
    } catch (const ske::invalid_input& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
