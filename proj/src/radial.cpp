#include "ske/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include "ske/errors.hpp"
#include "ske/io.hpp"

namespace ske::radial {

namespace {

constexpr double kConvexitySlack = 1e-12;

double pow_int(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

// Stable log(sum exp(terms)).
xreal log_sum_exp(const std::vector<double>& terms) {
    if (terms.empty()) return xreal::neg_inf();
    double m = *std::max_element(terms.begin(), terms.end());
    if (!std::isfinite(m)) throw error("log_sum_exp: nonfinite term");
    double s = 0.0;
    for (double t : terms) s += std::exp(t - m);
    return xreal(m + std::log(s));
}

void require_same_grid(const grid& a, const grid& b, const char* where) {
    if (!(a == b)) throw grid_mismatch(std::string(where) + ": grid mismatch");
}

} // namespace

void grid::validate() const {
    if (!(t_min < 0.0)) throw invalid_input("grid: t_min must be negative");
    if (n_points < 64) throw invalid_input("grid: N must be >= 64");
    if (dim < 1) throw invalid_input("grid: dim must be >= 1");
}

radial_function::radial_function(grid g, std::vector<double> values, double lelong)
    : grid_(g), values_(std::move(values)), lelong_(lelong) {
    grid_.validate();
    if (static_cast<int>(values_.size()) != grid_.n_points + 1)
        throw invalid_input("radial_function: values size != N + 1");
    if (!(lelong_ >= 0.0)) throw invalid_input("radial_function: lelong must be >= 0");
    const int n = grid_.n_points;
    if (std::abs(values_[n]) > kConvexitySlack)
        throw invalid_input("radial_function: v(0) must be 0 (zero boundary data)");
    values_[n] = 0.0;
    double scale = std::max(1.0, std::abs(values_[0]) / -grid_.t_min);
    double prev = lelong_;
    for (int j = 1; j <= n; ++j) {
        double d = slope(j);
        if (d < prev - kConvexitySlack * scale)
            throw not_convex("radial_function: discrete convexity fails at cell " +
                             std::to_string(j));
        if (d < -kConvexitySlack * scale)
            throw not_convex("radial_function: decreasing at cell " + std::to_string(j));
        prev = d;
    }
}

radial_function radial_function::zero(const grid& g) {
    return radial_function(g, std::vector<double>(g.n_points + 1, 0.0), 0.0);
}

double radial_function::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

void radial_measure::validate() const {
    g.validate();
    if (static_cast<int>(cumulative.size()) != g.n_points + 1)
        throw invalid_input("radial_measure: cumulative size != N + 1");
    if (!(cumulative[0] >= -1e-15))
        throw invalid_input("radial_measure: negative mass");
    for (size_t i = 1; i < cumulative.size(); ++i)
        if (cumulative[i] < cumulative[i - 1] - 1e-12 * std::max(1.0, total()))
            throw invalid_input("radial_measure: cumulative not nondecreasing");
    if (!std::isfinite(total()))
        throw invalid_input("radial_measure: total mass not finite");
    if (kappa) {
        if (!(*kappa > 0.0)) throw invalid_input("radial_measure: kappa must be positive");
        // Conical consistency: cumulative must follow total * e^{kappa t}.
        for (int i = 0; i <= g.n_points; ++i) {
            double expect = total() * std::exp(*kappa * g.node(i));
            if (std::abs(cumulative[i] - expect) > 1e-9 * std::max(1.0, total()))
                throw invalid_input("radial_measure: cumulative does not match e^{kappa t}");
        }
    }
}

radial_measure radial_measure::model(const grid& g, double kappa, double mass) {
    g.validate();
    if (!(kappa > 0.0)) throw invalid_input("model measure: kappa must be positive");
    if (!(mass > 0.0)) throw invalid_input("model measure: mass must be positive");
    radial_measure mu;
    mu.g = g;
    mu.kappa = kappa;
    mu.cumulative.resize(g.n_points + 1);
    for (int i = 0; i <= g.n_points; ++i)
        mu.cumulative[i] = mass * std::exp(kappa * g.node(i));
    mu.cumulative[g.n_points] = mass;
    return mu;
}

radial_measure ma_cumulative_mass(const radial_function& v) {
    const int n = v.g().dim;
    const int N = v.g().n_points;
    radial_measure m;
    m.g = v.g();
    m.cumulative.resize(N + 1);
    m.cumulative[0] = pow_int(v.lelong(), n);
    for (int j = 1; j <= N; ++j)
        m.cumulative[j] = pow_int(std::max(v.slope(j), 0.0), n);
    // Monotone by convexity; clean up roundoff at the slack scale.
    for (int j = 1; j <= N; ++j)
        m.cumulative[j] = std::max(m.cumulative[j], m.cumulative[j - 1]);
    return m;
}

xreal energy_E0(const radial_function& v) {
    const int n = v.g().dim;
    const int N = v.g().n_points;
    if (v.lelong() > 0.0) return xreal::neg_inf(); // atom at v(p) = -inf
    // The cumulative sample M_j = slope(j)^n lives at the cell midpoint, so
    // the increment M_j - M_{j-1} is carried by the interval centered at the
    // left node t_{j-1}.
    double prev = 0.0;
    double acc = 0.0;
    for (int j = 1; j <= N; ++j) {
        double mj = pow_int(std::max(v.slope(j), 0.0), n);
        acc += v.value(j - 1) * (mj - prev);
        prev = mj;
    }
    return xreal(acc / (n + 1));
}

xreal log_exp_integral(const radial_function& v, double gamma,
                       const radial_measure& mu) {
    require_same_grid(v.g(), mu.g, "log_exp_integral");
    if (!(gamma > 0.0)) throw invalid_input("log_exp_integral: gamma must be positive");
    const int N = v.g().n_points;
    std::vector<double> terms;
    terms.reserve(N + 1);

    // Tail below t_min: analytic against the Lelong asymptote.
    const double head = mu.cumulative[0];
    if (mu.kappa) {
        const double kappa = *mu.kappa;
        if (gamma * v.lelong() >= kappa) return xreal::pos_inf();
        if (head > 0.0)
            terms.push_back(std::log(head) - gamma * v.value(0) +
                            std::log(kappa / (kappa - gamma * v.lelong())));
    } else if (head > 0.0) {
        if (v.lelong() > 0.0) return xreal::pos_inf(); // atom against e^{+inf}
        terms.push_back(std::log(head) - gamma * v.value(0));
    }
    for (int j = 1; j <= N; ++j) {
        double dm = mu.cell_mass(j);
        if (dm > 0.0) terms.push_back(std::log(dm) - gamma * v.cell_mid(j));
    }
    return log_sum_exp(terms);
}

xreal exp_integral(const radial_function& v, double gamma,
                   const radial_measure& mu) {
    xreal l = log_exp_integral(v, gamma, mu);
    if (l.is_pos_inf()) return xreal::pos_inf();
    if (l.is_neg_inf()) return xreal(0.0);
    if (l.value() > 700.0) return xreal::pos_inf();
    return xreal(std::exp(l.value()));
}

xreal ding_F(const radial_function& v, double gamma, const radial_measure& mu) {
    xreal l = log_exp_integral(v, gamma, mu);
    if (l.is_pos_inf())
        throw divergent_integral("ding_F: exponential integral diverges");
    xreal e = energy_E0(v);
    if (e.is_neg_inf()) return xreal::neg_inf();
    return xreal(e.value() + l.value() / gamma);
}

radial_function green_family(double lambda, double eps, const grid& g) {
    if (!(lambda > 0.0)) throw invalid_input("green_family: lambda must be positive");
    if (!(eps >= 0.0)) throw invalid_input("green_family: eps must be >= 0");
    g.validate();
    const int N = g.n_points;
    std::vector<double> vals(N + 1);
    double lelong = 0.0;
    if (eps == 0.0) {
        for (int i = 0; i <= N; ++i) vals[i] = 2.0 * lambda * g.node(i);
        lelong = 2.0 * lambda;
    } else {
        const double e2 = eps * eps;
        const double norm = std::log1p(e2);
        for (int i = 0; i <= N; ++i) {
            double t = g.node(i);
            vals[i] = lambda * (std::log(std::exp(2.0 * t) + e2) - norm);
        }
    }
    vals[N] = 0.0;
    return radial_function(g, std::move(vals), lelong);
}

namespace {

// Shared cell decomposition: index 0 is the tail cell (-inf, t_0], then the
// N grid cells. Cell value of a node function g is g_0 on the tail and the
// midpoint on grid cells.
double cell_value(const std::vector<double>& g_values, int cell) {
    if (cell == 0) return g_values[0];
    return 0.5 * (g_values[cell - 1] + g_values[cell]);
}

} // namespace

xreal entropy_relative(const radial_measure& nu, const radial_measure& mu) {
    require_same_grid(nu.g, mu.g, "entropy_relative");
    const double tol = 1e-8;
    if (std::abs(nu.total() - 1.0) > tol || std::abs(mu.total() - 1.0) > tol)
        throw not_probability("entropy_relative: measures must be probabilities");
    const int N = nu.g.n_points;
    double h = 0.0;
    for (int cell = 0; cell <= N; ++cell) {
        double a = cell == 0 ? nu.cumulative[0] : nu.cell_mass(cell);
        double b = cell == 0 ? mu.cumulative[0] : mu.cell_mass(cell);
        a = std::max(a, 0.0);
        b = std::max(b, 0.0);
        // cumulative differences reintroduce ~1 ulp mass on empty cells
        if (a <= 1e-14) continue; // 0 log 0 = 0
        if (b == 0.0) return xreal::pos_inf();
        h += a * std::log(a / b);
    }
    return xreal(std::max(h, 0.0));
}

gibbs_result gibbs_measure(const std::vector<double>& g_values,
                           const radial_measure& mu) {
    if (static_cast<int>(g_values.size()) != mu.g.n_points + 1)
        throw invalid_input("gibbs_measure: g size != N + 1");
    const int N = mu.g.n_points;
    std::vector<double> logw;
    std::vector<int> cells;
    for (int cell = 0; cell <= N; ++cell) {
        double m = cell == 0 ? mu.cumulative[0] : mu.cell_mass(cell);
        if (m > 0.0) {
            logw.push_back(std::log(m) + cell_value(g_values, cell));
            cells.push_back(cell);
        }
    }
    xreal lz = log_sum_exp(logw);
    if (!lz.finite()) throw error("gibbs_measure: degenerate measure");
    gibbs_result out;
    out.log_z = lz.value();
    out.nu.g = mu.g;
    out.nu.cumulative.assign(N + 1, 0.0);
    std::vector<double> mass(N + 1, 0.0);
    for (size_t i = 0; i < cells.size(); ++i)
        mass[cells[i]] = std::exp(logw[i] - out.log_z);
    double acc = 0.0;
    for (int cell = 0; cell <= N; ++cell) {
        acc += mass[cell];
        out.nu.cumulative[cell] = acc;
    }
    out.nu.cumulative[N] = 1.0;
    return out;
}

double duality_defect(const std::vector<double>& g_values,
                      const radial_measure& mu,
                      const std::vector<radial_measure>& candidates) {
    if (candidates.empty()) throw invalid_input("duality_defect: no candidates");
    const int N = mu.g.n_points;
    // log int e^g dmu in the shared cell convention.
    std::vector<double> logw;
    for (int cell = 0; cell <= N; ++cell) {
        double m = cell == 0 ? mu.cumulative[0] : mu.cell_mass(cell);
        if (m > 0.0) logw.push_back(std::log(m) + cell_value(g_values, cell));
    }
    xreal lz = log_sum_exp(logw);
    if (!lz.finite()) throw error("duality_defect: degenerate measure");

    double best = -std::numeric_limits<double>::infinity();
    for (const auto& nu : candidates) {
        require_same_grid(nu.g, mu.g, "duality_defect");
        xreal h = entropy_relative(nu, mu);
        if (!h.finite()) continue;
        double lin = 0.0;
        for (int cell = 0; cell <= N; ++cell) {
            double a = cell == 0 ? nu.cumulative[0] : nu.cell_mass(cell);
            if (a > 0.0) lin += a * cell_value(g_values, cell);
        }
        best = std::max(best, lin - h.value());
    }
    if (!std::isfinite(best))
        throw error("duality_defect: all candidates have infinite entropy");
    return lz.value() - best;
}

// --------------------------- CSV serialization ---------------------------

namespace {

std::string meta_line(const grid& g, const char* extra_key, double extra_val,
                      bool has_extra) {
    std::ostringstream ss;
    ss << "# t_min=" << io::fmt_double(g.t_min) << ",N=" << g.n_points
       << ",dim=" << g.dim;
    if (has_extra) ss << ',' << extra_key << '=' << io::fmt_double(extra_val);
    ss << '\n';
    return ss.str();
}

std::map<std::string, std::string> parse_meta(const std::string& line,
                                              const std::string& what) {
    if (line.rfind("# ", 0) != 0) throw invalid_input(what + ": missing metadata header");
    std::map<std::string, std::string> kv;
    std::string body = line.substr(2);
    std::istringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw invalid_input(what + ": bad metadata item");
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return kv;
}

} // namespace

void write_csv(const std::filesystem::path& path, const radial_function& v) {
    std::ostringstream out;
    out << meta_line(v.g(), "lelong", v.lelong(), true);
    out << "t,value\n";
    for (int i = 0; i <= v.g().n_points; ++i)
        out << io::fmt_double(v.g().node(i)) << ',' << io::fmt_double(v.value(i)) << '\n';
    io::atomic_write(path, out.str());
}

void write_csv(const std::filesystem::path& path, const radial_measure& mu) {
    std::ostringstream out;
    out << meta_line(mu.g, "kappa", mu.kappa.value_or(0.0), mu.kappa.has_value());
    out << "t,cumulative\n";
    for (int i = 0; i <= mu.g.n_points; ++i)
        out << io::fmt_double(mu.g.node(i)) << ',' << io::fmt_double(mu.cumulative[i]) << '\n';
    io::atomic_write(path, out.str());
}

namespace {

std::pair<grid, std::vector<double>> read_csv_columns(
    const std::filesystem::path& path, const std::string& what,
    std::map<std::string, std::string>& meta) {
    std::istringstream in(io::read_file(path));
    std::string line;
    if (!std::getline(in, line)) throw invalid_input(what + ": empty file");
    meta = parse_meta(line, what);
    grid g;
    try {
        g.t_min = std::stod(meta.at("t_min"));
        g.n_points = std::stoi(meta.at("N"));
        g.dim = std::stoi(meta.at("dim"));
    } catch (const std::exception&) {
        throw invalid_input(what + ": malformed grid metadata");
    }
    if (!std::getline(in, line)) throw invalid_input(what + ": missing column header");
    std::vector<double> col;
    col.reserve(g.n_points + 1);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw invalid_input(what + ": malformed row");
        col.push_back(std::stod(line.substr(comma + 1)));
    }
    return {g, std::move(col)};
}

} // namespace

radial_function read_function_csv(const std::filesystem::path& path) {
    std::map<std::string, std::string> meta;
    auto [g, col] = read_csv_columns(path, "radial function csv", meta);
    double lelong = meta.count("lelong") ? std::stod(meta.at("lelong")) : 0.0;
    return radial_function(g, std::move(col), lelong);
}

radial_measure read_measure_csv(const std::filesystem::path& path) {
    std::map<std::string, std::string> meta;
    auto [g, col] = read_csv_columns(path, "radial measure csv", meta);
    radial_measure mu;
    mu.g = g;
    mu.cumulative = std::move(col);
    if (meta.count("kappa")) mu.kappa = std::stod(meta.at("kappa"));
    mu.validate();
    return mu;
}

} // namespace ske::radial
