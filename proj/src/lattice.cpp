#include "ske/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "ske/errors.hpp"

namespace ske::lattice {

namespace {

using matrix = std::vector<std::vector<rational>>;

// Row-reduces m in place, returns the rank.
int rref(matrix& m) {
    if (m.empty()) return 0;
    const int rows = static_cast<int>(m.size());
    const int cols = static_cast<int>(m[0].size());
    int rank = 0;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int pivot = -1;
        for (int r = rank; r < rows; ++r)
            if (m[r][col] != 0) { pivot = r; break; }
        if (pivot < 0) continue;
        std::swap(m[rank], m[pivot]);
        rational inv = m[rank][col];
        for (int c = col; c < cols; ++c) m[rank][c] /= inv;
        for (int r = 0; r < rows; ++r) {
            if (r == rank || m[r][col] == 0) continue;
            rational f = m[r][col];
            for (int c = col; c < cols; ++c) m[r][c] -= f * m[rank][c];
        }
        ++rank;
    }
    return rank;
}

// One-dimensional nullspace of an (rows x cols) matrix, or empty if the
// nullspace dimension is not exactly one.
std::vector<rational> nullspace_1d(matrix m) {
    if (m.empty()) return {};
    const int cols = static_cast<int>(m[0].size());
    int rank = rref(m);
    if (cols - rank != 1) return {};
    // Identify pivot columns.
    std::vector<int> pivot_col;
    {
        int r = 0;
        for (int c = 0; c < cols && r < rank; ++c) {
            if (m[r][c] == 1) {
                bool is_pivot = true;
                for (int rr = 0; rr < rank; ++rr)
                    if (rr != r && m[rr][c] != 0) { is_pivot = false; break; }
                if (is_pivot) { pivot_col.push_back(c); ++r; }
            }
        }
        if (r != rank) return {}; // unexpected structure
    }
    std::vector<bool> is_pivot(cols, false);
    for (int c : pivot_col) is_pivot[c] = true;
    int free_col = -1;
    for (int c = 0; c < cols; ++c)
        if (!is_pivot[c]) { free_col = c; break; }
    std::vector<rational> v(cols, rational(0));
    v[free_col] = 1;
    for (int r = 0; r < rank; ++r) v[pivot_col[r]] = -m[r][free_col];
    return v;
}

// Solves the square system A x = b exactly; empty optional when singular.
std::optional<std::vector<rational>> solve_square(matrix a, std::vector<rational> b) {
    const int n = static_cast<int>(a.size());
    for (int i = 0; i < n; ++i) a[i].push_back(b[i]);
    int rank = rref(a);
    if (rank != n) return std::nullopt;
    std::vector<rational> x(n);
    for (int i = 0; i < n; ++i) x[i] = a[i][n];
    return x;
}

int matrix_rank(matrix m) { return rref(m); }

bool next_combination(std::vector<int>& idx, int n) {
    const int k = static_cast<int>(idx.size());
    for (int i = k - 1; i >= 0; --i) {
        if (idx[i] < n - (k - i)) {
            ++idx[i];
            for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

std::string facet_key(const facet& f) {
    std::ostringstream ss;
    for (const auto& wi : f.w) ss << wi << ',';
    ss << '|' << f.c;
    return ss.str();
}

// ---------------------------------------------------------------------
// Exact volume of (orthant \ P) by recursive slicing along the last
// coordinate. P is given by inequalities <w, x> >= c, w >= 0, plus the
// implicit orthant. The slice volume is piecewise polynomial in the slice
// position; each piece is recovered by exact interpolation at rational
// sample points and integrated in closed form.
// ---------------------------------------------------------------------

struct ineq {
    std::vector<rational> w;
    rational c;
};

// Integral over [s0, s1] of the Lagrange interpolant through (xs, ys).
rational integrate_interpolant(const std::vector<rational>& xs,
                               const std::vector<rational>& ys,
                               const rational& s0, const rational& s1) {
    const int m = static_cast<int>(xs.size());
    rational total(0);
    for (int j = 0; j < m; ++j) {
        if (ys[j] == 0) continue;
        // numerator polynomial prod_{k != j} (s - x_k), coefficients low->high
        std::vector<rational> poly{rational(1)};
        rational denom(1);
        for (int k = 0; k < m; ++k) {
            if (k == j) continue;
            denom *= xs[j] - xs[k];
            std::vector<rational> next(poly.size() + 1, rational(0));
            for (size_t t = 0; t < poly.size(); ++t) {
                next[t] -= poly[t] * xs[k];
                next[t + 1] += poly[t];
            }
            poly = std::move(next);
        }
        rational integral(0);
        rational p0(1), p1(1);
        for (size_t t = 0; t < poly.size(); ++t) {
            p0 *= s0;
            p1 *= s1;
            integral += poly[t] * (p1 - p0) / rational(static_cast<int>(t) + 1);
        }
        total += ys[j] * integral / denom;
    }
    return total;
}

rational complement_volume(const std::vector<ineq>& ineqs,
                           const std::vector<rational>& extent, int d) {
    if (d == 1) {
        rational tau(0);
        for (const auto& q : ineqs) {
            if (q.c <= 0) continue;
            if (q.w[0] <= 0)
                throw error("covolume: unbounded slice (ideal not m-primary?)");
            rational t = q.c / q.w[0];
            if (t > tau) tau = t;
        }
        return tau;
    }
    const int last = d - 1;
    const rational upper = extent[last];

    // Breakpoint candidates: last coordinates of all d-fold constraint
    // intersections (inequalities as equalities plus coordinate planes).
    std::set<rational> breaks{rational(0), upper};
    {
        const int nf = static_cast<int>(ineqs.size());
        const int total = nf + d;
        std::vector<int> pick(d);
        std::iota(pick.begin(), pick.end(), 0);
        do {
            matrix a(d, std::vector<rational>(d, rational(0)));
            std::vector<rational> b(d, rational(0));
            for (int r = 0; r < d; ++r) {
                int id = pick[r];
                if (id < nf) {
                    for (int c = 0; c < d; ++c) a[r][c] = ineqs[id].w[c];
                    b[r] = ineqs[id].c;
                } else {
                    a[r][id - nf] = 1;
                }
            }
            auto x = solve_square(std::move(a), std::move(b));
            if (x && (*x)[last] > 0 && (*x)[last] < upper) breaks.insert((*x)[last]);
        } while (next_combination(pick, total));
    }

    std::vector<rational> bp(breaks.begin(), breaks.end());
    rational volume(0);
    for (size_t p = 0; p + 1 < bp.size(); ++p) {
        const rational s0 = bp[p], s1 = bp[p + 1];
        // The slice volume has degree <= d-1; d samples determine it.
        std::vector<rational> xs(d), ys(d);
        for (int j = 0; j < d; ++j) {
            xs[j] = s0 + (s1 - s0) * rational(j + 1) / rational(d + 1);
            std::vector<ineq> cut;
            cut.reserve(ineqs.size());
            for (const auto& q : ineqs) {
                ineq r;
                r.w.assign(q.w.begin(), q.w.begin() + last);
                r.c = q.c - q.w[last] * xs[j];
                if (r.c <= 0) continue; // satisfied on the orthant
                bool all_zero = true;
                for (const auto& wi : r.w)
                    if (wi != 0) { all_zero = false; break; }
                if (all_zero)
                    throw error("covolume: empty slice polyhedron");
                cut.push_back(std::move(r));
            }
            ys[j] = complement_volume(cut, extent, d - 1);
        }
        volume += integrate_interpolant(xs, ys, s0, s1);
    }
    return volume;
}

} // namespace

// -------------------------------------------------------------------------

monomial_ideal monomial_ideal::create(int n, std::vector<exponent_vector> gens) {
    if (n < 1) throw invalid_input("monomial_ideal: dimension must be >= 1");
    if (gens.empty()) throw invalid_input("monomial_ideal: empty generator set");
    for (const auto& g : gens) {
        if (static_cast<int>(g.size()) != n)
            throw invalid_input("monomial_ideal: generator length != n");
        for (long long e : g)
            if (e < 0) throw invalid_input("monomial_ideal: negative exponent");
    }
    std::sort(gens.begin(), gens.end());
    gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
    // Minimalize: drop any generator divisible by another.
    std::vector<exponent_vector> minimal;
    for (size_t i = 0; i < gens.size(); ++i) {
        bool redundant = false;
        for (size_t j = 0; j < gens.size() && !redundant; ++j) {
            if (i == j) continue;
            bool divides = true;
            for (int c = 0; c < n; ++c)
                if (gens[j][c] > gens[i][c]) { divides = false; break; }
            if (divides && gens[j] != gens[i]) redundant = true;
        }
        if (!redundant) minimal.push_back(gens[i]);
    }
    // m-primary: a pure power on every axis.
    for (int axis = 0; axis < n; ++axis) {
        bool found = false;
        for (const auto& g : minimal) {
            bool pure = g[axis] >= 1;
            for (int c = 0; c < n && pure; ++c)
                if (c != axis && g[c] != 0) pure = false;
            if (pure) { found = true; break; }
        }
        if (!found)
            throw not_primary("ideal is not m-primary: no pure power on axis " +
                              std::to_string(axis + 1));
    }
    monomial_ideal ideal;
    ideal.n = n;
    ideal.generators = std::move(minimal);
    return ideal;
}

bool monomial_ideal::contains(const exponent_vector& x) const {
    for (const auto& g : generators) {
        bool above = true;
        for (int c = 0; c < n; ++c)
            if (x[c] < g[c]) { above = false; break; }
        if (above) return true;
    }
    return false;
}

long long monomial_ideal::pure_power(int axis) const {
    long long best = -1;
    for (const auto& g : generators) {
        bool pure = g[axis] >= 1;
        for (int c = 0; c < n && pure; ++c)
            if (c != axis && g[c] != 0) pure = false;
        if (pure && (best < 0 || g[axis] < best)) best = g[axis];
    }
    if (best < 0) throw not_primary("no pure power on axis " + std::to_string(axis + 1));
    return best;
}

monomial_ideal monomial_ideal::power(int k) const {
    if (k < 1) throw invalid_input("ideal power: k must be >= 1");
    std::vector<exponent_vector> sums;
    std::vector<int> pick(static_cast<size_t>(k), 0);
    const int g = static_cast<int>(generators.size());
    // Multisets of size k over the generators.
    while (true) {
        exponent_vector s(n, 0);
        for (int i = 0; i < k; ++i)
            for (int c = 0; c < n; ++c) s[c] += generators[pick[i]][c];
        sums.push_back(std::move(s));
        int i = k - 1;
        while (i >= 0 && pick[i] == g - 1) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < k; ++j) pick[j] = pick[i];
    }
    return create(n, std::move(sums));
}

newton_polyhedron compute_newton_polyhedron(const monomial_ideal& ideal) {
    const int n = ideal.n;
    const auto& gens = ideal.generators;
    const int ng = static_cast<int>(gens.size());

    newton_polyhedron np;
    np.n = n;

    std::set<std::string> seen;
    // Support sizes a = 1..n. A nontrivial facet with support A contains the
    // recession rays e_i (i outside A) and touches at least |A| generators.
    for (int a = 1; a <= n; ++a) {
        if (a > ng) break;
        std::vector<int> axes(a);
        std::iota(axes.begin(), axes.end(), 0);
        do {
            std::vector<int> sub(a);
            std::iota(sub.begin(), sub.end(), 0);
            do {
                matrix m(a, std::vector<rational>(a + 1));
                for (int r = 0; r < a; ++r) {
                    for (int c = 0; c < a; ++c)
                        m[r][c] = rational(gens[sub[r]][axes[c]]);
                    m[r][a] = rational(-1);
                }
                auto v = nullspace_1d(std::move(m));
                if (v.empty()) continue;
                rational c = v[a];
                if (c < 0) {
                    for (auto& vi : v) vi = -vi;
                    c = v[a];
                }
                if (c == 0) continue;
                bool nonneg = true;
                for (int i = 0; i < a && nonneg; ++i)
                    if (v[i] < 0) nonneg = false;
                if (!nonneg) continue;

                // Scale to primitive integers.
                bigint lcm_den(1);
                for (int i = 0; i <= a; ++i)
                    lcm_den = boost::multiprecision::lcm(lcm_den, denominator(v[i]));
                std::vector<bigint> wz(n, bigint(0));
                for (int i = 0; i < a; ++i)
                    wz[axes[i]] = numerator(rational(v[i] * lcm_den));
                bigint cz = numerator(rational(c * lcm_den));
                bigint g = cz;
                for (const auto& wi : wz) g = boost::multiprecision::gcd(g, wi);
                if (g > 1) {
                    for (auto& wi : wz) wi /= g;
                    cz /= g;
                }

                // Validity: all generators on the correct side.
                bool valid = true;
                std::vector<int> touching;
                for (int gi = 0; gi < ng && valid; ++gi) {
                    bigint dot(0);
                    for (int cidx = 0; cidx < n; ++cidx)
                        dot += wz[cidx] * gens[gi][cidx];
                    if (dot < cz) valid = false;
                    else if (dot == cz) touching.push_back(gi);
                }
                if (!valid) continue;

                // Genuine facet: the touching generators span an (a-1)-dim
                // affine set inside the support coordinates.
                if (static_cast<int>(touching.size()) < a) continue;
                if (a > 1) {
                    matrix diff(touching.size() - 1, std::vector<rational>(a));
                    for (size_t r = 1; r < touching.size(); ++r)
                        for (int cidx = 0; cidx < a; ++cidx)
                            diff[r - 1][cidx] =
                                rational(gens[touching[r]][axes[cidx]] -
                                         gens[touching[0]][axes[cidx]]);
                    if (matrix_rank(std::move(diff)) != a - 1) continue;
                }

                facet f;
                f.w = std::move(wz);
                f.c = std::move(cz);
                f.coordinate = false;
                auto key = facet_key(f);
                if (seen.insert(key).second) np.facets.push_back(std::move(f));
            } while (next_combination(sub, ng));
        } while (next_combination(axes, n));
    }

    std::sort(np.facets.begin(), np.facets.end(), [](const facet& x, const facet& y) {
        if (x.w != y.w) return x.w < y.w;
        return x.c < y.c;
    });

    // Coordinate walls x_i >= 0 are facets for every m-primary ideal in
    // dimension >= 2.
    if (n >= 2) {
        for (int axis = 0; axis < n; ++axis) {
            facet f;
            f.w.assign(n, bigint(0));
            f.w[axis] = 1;
            f.c = 0;
            f.coordinate = true;
            np.facets.push_back(std::move(f));
        }
    }

    // Vertices of conv(G) + orthant are generators with n independent active
    // constraints (nontrivial facets and coordinate planes through them).
    for (const auto& g : gens) {
        matrix active;
        for (const auto& f : np.facets) {
            if (f.coordinate) continue;
            bigint dot(0);
            for (int c = 0; c < n; ++c) dot += f.w[c] * g[c];
            if (dot == f.c) {
                std::vector<rational> row(n);
                for (int c = 0; c < n; ++c) row[c] = rational(f.w[c]);
                active.push_back(std::move(row));
            }
        }
        for (int c = 0; c < n; ++c) {
            if (g[c] == 0) {
                std::vector<rational> row(n, rational(0));
                row[c] = 1;
                active.push_back(std::move(row));
            }
        }
        if (!active.empty() && matrix_rank(std::move(active)) == n)
            np.vertices.push_back(g);
    }
    std::sort(np.vertices.begin(), np.vertices.end());
    return np;
}

rational lct_monomial(const monomial_ideal& ideal) {
    auto np = compute_newton_polyhedron(ideal);
    std::optional<rational> best;
    for (const auto& f : np.facets) {
        if (f.coordinate) continue;
        bigint s(0);
        for (const auto& wi : f.w) s += wi;
        rational ratio = rational(s) / rational(f.c);
        if (!best || ratio < *best) best = ratio;
    }
    if (!best) throw error("lct: no nontrivial facet found");
    return *best;
}

rational multiplicity_covolume(const monomial_ideal& ideal) {
    auto np = compute_newton_polyhedron(ideal);
    std::vector<ineq> ineqs;
    for (const auto& f : np.facets) {
        if (f.coordinate) continue;
        ineq q;
        q.w.reserve(ideal.n);
        for (const auto& wi : f.w) q.w.push_back(rational(wi));
        q.c = rational(f.c);
        ineqs.push_back(std::move(q));
    }
    std::vector<rational> extent(ideal.n);
    for (int axis = 0; axis < ideal.n; ++axis)
        extent[axis] = rational(ideal.pure_power(axis));
    rational vol = complement_volume(ineqs, extent, ideal.n);
    return vol * rational(factorial(static_cast<unsigned>(ideal.n)));
}

length_fit multiplicity_length_oracle(const monomial_ideal& ideal, int m_max) {
    const int n = ideal.n;
    if (m_max < n + 2)
        throw invalid_input("length oracle: m_max must be >= n + 2");

    std::vector<long long> dims(n);
    long long total = 1;
    for (int axis = 0; axis < n; ++axis) {
        dims[axis] = static_cast<long long>(m_max) * ideal.pure_power(axis);
        total *= dims[axis];
        if (total > 60'000'000)
            throw invalid_input("length oracle: staircase box too large");
    }
    std::vector<long long> stride(n);
    stride[0] = 1;
    for (int axis = 1; axis < n; ++axis) stride[axis] = stride[axis - 1] * dims[axis - 1];

    // pulls[x] = how many generators can be peeled off x (capped at m_max);
    // x is in I^m exactly when pulls[x] >= m.
    std::vector<uint16_t> pulls(static_cast<size_t>(total), 0);
    std::vector<long long> x(n, 0);
    for (long long idx = 0; idx < total; ++idx) {
        int best = 0;
        for (const auto& g : ideal.generators) {
            bool above = true;
            long long off = idx;
            for (int c = 0; c < n && above; ++c) {
                if (x[c] < g[c]) above = false;
                else off -= g[c] * stride[c];
            }
            if (above) best = std::max(best, 1 + static_cast<int>(pulls[off]));
        }
        pulls[idx] = static_cast<uint16_t>(std::min(best, m_max));
        for (int c = 0; c < n; ++c) {
            if (++x[c] < dims[c]) break;
            x[c] = 0;
        }
    }

    std::vector<long long> hist(static_cast<size_t>(m_max) + 1, 0);
    for (auto v : pulls) ++hist[v];
    length_fit fit;
    fit.lengths.resize(m_max);
    long long acc = 0;
    for (int m = 1; m <= m_max; ++m) {
        acc += hist[m - 1];
        fit.lengths[m - 1] = acc;
    }

    // Least-squares degree-n fit of l(m) on three nested tail windows; the
    // spread across windows guards against preasymptotic bias.
    auto window_estimate = [&](int m_lo) -> double {
        const int deg = n;
        std::vector<long double> ata((deg + 1) * (deg + 1), 0.0L), atb(deg + 1, 0.0L);
        for (int m = m_lo; m <= m_max; ++m) {
            long double u = static_cast<long double>(m) / m_max;
            std::vector<long double> row(deg + 1);
            row[0] = 1.0L;
            for (int j = 1; j <= deg; ++j) row[j] = row[j - 1] * u;
            for (int i = 0; i <= deg; ++i) {
                for (int j = 0; j <= deg; ++j) ata[i * (deg + 1) + j] += row[i] * row[j];
                atb[i] += row[i] * fit.lengths[m - 1];
            }
        }
        // Gaussian elimination with partial pivoting.
        const int d = deg + 1;
        for (int col = 0; col < d; ++col) {
            int piv = col;
            for (int r = col + 1; r < d; ++r)
                if (std::abs(static_cast<double>(ata[r * d + col])) >
                    std::abs(static_cast<double>(ata[piv * d + col])))
                    piv = r;
            for (int c = 0; c < d; ++c) std::swap(ata[col * d + c], ata[piv * d + c]);
            std::swap(atb[col], atb[piv]);
            for (int r = 0; r < d; ++r) {
                if (r == col) continue;
                long double f = ata[r * d + col] / ata[col * d + col];
                for (int c = col; c < d; ++c) ata[r * d + c] -= f * ata[col * d + c];
                atb[r] -= f * atb[col];
            }
        }
        long double lead = atb[deg] / ata[deg * d + deg];
        long double nfact = 1.0L;
        for (int i = 2; i <= n; ++i) nfact *= i;
        long double scale = 1.0L;
        for (int i = 0; i < n; ++i) scale *= m_max;
        return static_cast<double>(lead * nfact / scale);
    };

    const int lo1 = std::max(1, (m_max + 1) / 2);
    const int lo2 = std::max(1, (3 * m_max) / 8);
    const int lo3 = std::max(1, m_max / 4);
    double e1 = window_estimate(lo1);
    double e2 = window_estimate(lo2);
    double e3 = window_estimate(lo3);
    fit.estimate = e1;
    fit.spread = std::max({std::abs(e1 - e2), std::abs(e1 - e3), std::abs(e2 - e3)});
    // Documented stability tolerance: 2% of the estimate.
    if (fit.spread > 0.02 * std::max(std::abs(fit.estimate), 1e-12))
        throw fit_unstable("length oracle: window estimates spread " +
                           std::to_string(fit.spread));
    return fit;
}

ak_data ak_valuation_data(int n, int k, double w0) {
    if (n < 2) throw invalid_input("ak_valuation_data: n must be >= 2");
    if (k < 1) throw invalid_input("ak_valuation_data: k must be >= 1");
    if (!(w0 > 0.0)) throw invalid_input("ak_valuation_data: w0 must be positive");
    const double cut = std::min((k + 1) * w0, 2.0);
    ak_data d;
    d.log_discrepancy = w0 + n - cut;
    d.volume = cut / w0;
    if (!(d.log_discrepancy > 0.0))
        throw non_log_terminal_weight("ak_valuation_data: nonpositive log discrepancy");
    return d;
}

double ak_vol_hat_closed_form(int n, int k) {
    if (n < 2 || k < 1) throw invalid_input("ak_vol_hat: need n >= 2, k >= 1");
    const bool first_branch = (n > 2) && ((k + 1) * (n - 2) >= 2 * (n - 1));
    if (first_branch) {
        // (2^{1/n} ((n-2)/(n-1))^{1-1/n} n)^n = 2 ((n-2)/(n-1))^{n-1} n^n
        return 2.0 * std::pow(double(n - 2) / double(n - 1), n - 1) * std::pow(double(n), n);
    }
    // ((k+1)^{1/n} ((n-2)(k+1)+2)/(k+1))^n = ((n-2)(k+1)+2)^n / (k+1)^{n-1}
    return std::pow(double((n - 2) * (k + 1) + 2), n) / std::pow(double(k + 1), n - 1);
}

volhat_result normalized_volume_smooth(int n, double tol) {
    if (n < 1) throw invalid_input("normalized_volume_smooth: n must be >= 1");
    if (!(tol > 0.0)) throw invalid_input("normalized_volume_smooth: tol must be positive");
    // Minimize f(x) = n log(sum e^{x_i}) - sum x_i (convex, scale-fixed by
    // keeping x mean-zero; the gradient already sums to zero).
    std::vector<double> x(n);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
        x[i] = 0.4 * std::sin(3.7 * i + 1.1);
        mean += x[i];
    }
    for (auto& xi : x) xi -= mean / n;

    auto value = [&](const std::vector<double>& p) {
        double mx = *std::max_element(p.begin(), p.end());
        double s = 0.0, lin = 0.0;
        for (double pi : p) { s += std::exp(pi - mx); lin += pi; }
        return n * (std::log(s) + mx) - lin;
    };
    const int max_iter = 20000;
    double f = value(x);
    for (int it = 0; it < max_iter; ++it) {
        double mx = *std::max_element(x.begin(), x.end());
        double s = 0.0;
        for (double xi : x) s += std::exp(xi - mx);
        std::vector<double> grad(n);
        double gmax = 0.0;
        for (int i = 0; i < n; ++i) {
            grad[i] = n * std::exp(x[i] - mx) / s - 1.0;
            gmax = std::max(gmax, std::abs(grad[i]));
        }
        if (gmax < 1e-13) break;
        double step = 1.0;
        while (step > 1e-18) {
            std::vector<double> trial(n);
            for (int i = 0; i < n; ++i) trial[i] = x[i] - step * grad[i];
            double ft = value(trial);
            if (ft < f - 0.25 * step * gmax * gmax) {
                x = std::move(trial);
                f = ft;
                break;
            }
            step *= 0.5;
        }
        if (step <= 1e-18) break;
    }
    volhat_result res;
    res.vol_hat = std::exp(f);
    if (std::abs(res.vol_hat - std::pow(double(n), n)) > tol * std::pow(double(n), n) &&
        std::abs(res.vol_hat - std::pow(double(n), n)) > tol)
        throw tolerance_not_reached("normalized_volume_smooth: descent stalled");
    double wmean = 0.0;
    res.argmin.weights.resize(n);
    for (int i = 0; i < n; ++i) { res.argmin.weights[i] = std::exp(x[i]); wmean += res.argmin.weights[i]; }
    for (auto& w : res.argmin.weights) w *= n / wmean;
    return res;
}

volhat_result normalized_volume_ak(int n, int k, double tol) {
    if (!(tol > 0.0)) throw invalid_input("normalized_volume_ak: tol must be positive");
    auto objective = [&](double u) {
        ak_data d = ak_valuation_data(n, k, std::exp(u));
        return std::pow(d.log_discrepancy, n) * d.volume;
    };
    // Golden section in u = log w0 on [log 1e-3, log 1e3]; the objective is
    // unimodal with at most one kink at (k+1) w0 = 2.
    double a = std::log(1e-3), b = std::log(1e3);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(c), fd = objective(d);
    const int cap = 200;
    int it = 0;
    while (b - a > 1e-12 && it++ < cap) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    if (b - a > std::max(tol, 1e-10))
        throw tolerance_not_reached("normalized_volume_ak: golden section cap reached");
    double u = 0.5 * (a + b);
    volhat_result res;
    res.vol_hat = objective(u);
    res.argmin.weights.assign(static_cast<size_t>(n) + 1, 1.0);
    res.argmin.weights[0] = std::exp(u);
    return res;
}

void singularity_profile::validate() const {
    if (n < 1) throw invalid_input("profile '" + name + "': n must be >= 1");
    if (mult < 1) throw invalid_input("profile '" + name + "': mult must be >= 1");
    if (!(lct > 0.0) || lct > n + 1e-12)
        throw invalid_input("profile '" + name + "': lct must lie in (0, n]");
    if (!(vol_hat > 0.0)) throw invalid_input("profile '" + name + "': vol_hat must be positive");
    for (double a : discrepancies)
        if (!(a > -1.0))
            throw invalid_input("profile '" + name + "': discrepancy <= -1 (not log terminal)");
    if (!(kappa > 0.0)) throw invalid_input("profile '" + name + "': kappa must be positive");
}

bound_report bounds_report(const singularity_profile& p) {
    p.validate();
    bound_report r;
    r.profile = p;
    const double n = p.n;
    const double vhn = std::pow(p.vol_hat, 1.0 / n);
    r.alpha_lower_mult_lct =
        n / std::pow(double(p.mult), 1.0 - 1.0 / n) * (p.lct / (1.0 + p.lct));
    double max_disc = 0.0;
    bool admissible = true;
    for (double a : p.discrepancies) {
        if (a > 0.0) admissible = false;
        max_disc = std::max(max_disc, a);
    }
    r.admissible = admissible;
    r.alpha_lower_volume = vhn / (1.0 + std::max(max_disc, 0.0));
    r.alpha_lower = std::max(r.alpha_lower_mult_lct, r.alpha_lower_volume);
    r.alpha_upper = vhn;
    r.alpha_tilde = vhn;
    if (r.alpha_lower > r.alpha_upper * (1.0 + 1e-9) + 1e-12)
        throw inconsistent_profile("profile '" + p.name +
                                   "': alpha lower bound exceeds upper bound");
    r.alpha_lower = std::min(r.alpha_lower, r.alpha_upper);
    r.alpha_exact = (r.alpha_upper - r.alpha_lower) <= 1e-12 * (1.0 + r.alpha_upper);
    r.gamma_lower = (n + 1.0) / n * r.alpha_lower;
    r.gamma_upper = (n + 1.0) / n * r.alpha_upper;
    r.integrability_sup = 1.0 + p.lct;
    return r;
}

std::vector<singularity_profile> builtin_profiles() {
    std::vector<singularity_profile> out;
    for (int n = 1; n <= 4; ++n) {
        singularity_profile p;
        p.name = "smooth_n" + std::to_string(n);
        p.n = n;
        p.mult = 1;
        p.lct = n;
        p.vol_hat = std::pow(double(n), n);
        p.discrepancies = {0.0};
        p.kappa = 2.0 * n;
        out.push_back(std::move(p));
    }
    for (int n = 2; n <= 6; ++n) {
        singularity_profile p;
        p.name = "ODP_n" + std::to_string(n);
        p.n = n;
        p.mult = 2;
        p.lct = n - 1.0;
        p.vol_hat = 2.0 * std::pow(double(n - 1), n);
        p.discrepancies = {double(n - 2)};
        p.kappa = 2.0 * (n - 1.0);
        out.push_back(std::move(p));
    }
    for (int n : {2, 3, 4, 6}) {
        for (int k : {2, 3, 9}) { // k = 1 is the ODP above
            singularity_profile p;
            p.name = "A" + std::to_string(k) + "_n" + std::to_string(n);
            p.n = n;
            p.mult = 2;
            p.lct = n - 2.0 + 2.0 / (k + 1.0);
            p.vol_hat = ak_vol_hat_closed_form(n, k);
            if (n == 2) {
                // Du Val surface singularities admit crepant resolutions.
                p.discrepancies.assign(static_cast<size_t>(k), 0.0);
            } else {
                const bool first_branch = (k + 1) * (n - 2) >= 2 * (n - 1);
                double w0 = first_branch ? double(n - 2) / double(n - 1)
                                         : 2.0 / double(k + 1);
                ak_data d = ak_valuation_data(n, k, w0);
                p.discrepancies = {d.log_discrepancy - 1.0};
            }
            p.kappa = 2.0 * p.lct;
            out.push_back(std::move(p));
        }
    }
    return out;
}

} // namespace ske::lattice
