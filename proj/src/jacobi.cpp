#include "qdt/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qdt/periods.hpp"

namespace qdt {

namespace {

using lcplx = std::complex<long double>;

// Falling-factorial binomial C(gamma, k) = gamma (gamma-1) ... (gamma-k+1) / k!
// for complex gamma and integer k >= 0.
lcplx gen_binomial(lcplx gamma, int k) {
    lcplx num = 1.0L;
    for (int i = 0; i < k; ++i) num *= (gamma - lcplx(i)) / lcplx(i + 1);
    return num;
}

lcplx horner(const std::vector<lcplx>& c, lcplx z) {
    lcplx acc = 0.0L;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
    return acc;
}

lcplx horner_derivative(const std::vector<lcplx>& c, lcplx z) {
    lcplx acc = 0.0L;
    for (std::size_t i = c.size(); i-- > 1;) acc = acc * z + lcplx((long double)i) * c[i];
    return acc;
}

}  // namespace

cplx PolySpec::eval(cplx z) const {
    const lcplx v = horner(coeffs_ext, lcplx(z.real(), z.imag()));
    return cplx(double(v.real()), double(v.imag()));
}

cplx PolySpec::eval_derivative(cplx z) const {
    const lcplx v = horner_derivative(coeffs_ext, lcplx(z.real(), z.imag()));
    return cplx(double(v.real()), double(v.imag()));
}

PolySpec build(int n, cplx alpha, cplx beta) {
    if (n < 0) throw std::invalid_argument("build: degree must be nonnegative");
    PolySpec spec;
    spec.n = n;
    spec.alpha = alpha;
    spec.beta = beta;

    const lcplx la(alpha.real(), alpha.imag());
    const lcplx lb(beta.real(), beta.imag());

    // binomial rows of (z-1)^k and (z+1)^(n-k) combined term by term
    std::vector<long double> pascal(n + 1);
    std::vector<lcplx> acc(n + 1, lcplx(0.0L));
    std::vector<long double> mag(n + 1, 0.0L);

    for (int k = 0; k <= n; ++k) {
        const lcplx ck = gen_binomial(la + lcplx(n), n - k) * gen_binomial(lb + lcplx(n), k);
        if (ck == lcplx(0.0L)) continue;
        // expand (z-1)^k (z+1)^(n-k) by convolving the two binomial rows
        std::vector<long double> left(k + 1), right(n - k + 1);
        long double c = 1.0L;
        for (int j = 0; j <= k; ++j) {
            left[j] = ((k - j) % 2 == 0 ? c : -c);  // coefficient of z^j in (z-1)^k
            c = c * (long double)(k - j) / (long double)(j + 1);
        }
        c = 1.0L;
        for (int j = 0; j <= n - k; ++j) {
            right[j] = c;  // coefficient of z^j in (z+1)^(n-k)
            c = c * (long double)(n - k - j) / (long double)(j + 1);
        }
        for (int i = 0; i <= k; ++i)
            for (int j = 0; j <= n - k; ++j) {
                const lcplx term = ck * lcplx(left[i] * right[j]);
                acc[i + j] += term;
                mag[i + j] += std::abs(term);
            }
    }
    (void)pascal;

    const long double two_n = std::pow(2.0L, (long double)n);
    spec.coeffs_ext.resize(n + 1);
    spec.coeffs.resize(n + 1);
    double cond = 1.0;
    for (int i = 0; i <= n; ++i) {
        spec.coeffs_ext[i] = acc[i] / two_n;
        spec.coeffs[i] = cplx(double(spec.coeffs_ext[i].real()), double(spec.coeffs_ext[i].imag()));
        const long double a = std::abs(acc[i]);
        if (a > 0.0L) cond = std::max(cond, double(mag[i] / a));
    }
    spec.condition = cond;
    if (cond > 1e15)
        throw std::runtime_error("build: coefficient cancellation exceeds working precision (cond ~ " +
                                 std::to_string(cond) + ")");

    // effective degree: a leading coefficient counts as vanished only when it
    // drowned in the accumulation noise of its own term sum
    int deg = 0;
    for (int i = n; i >= 0; --i) {
        if (std::abs(acc[i]) > 1e3L * 1.1e-19L * mag[i] && acc[i] != lcplx(0.0L)) {
            deg = i;
            break;
        }
    }
    spec.effective_degree = deg;
    spec.degree_dropped = deg != n;
    return spec;
}

RootSet roots(const PolySpec& spec) {
    const int deg = spec.effective_degree;
    if (deg < 1) throw std::invalid_argument("roots: effective degree must be at least 1");

    std::vector<lcplx> c(spec.coeffs_ext.begin(), spec.coeffs_ext.begin() + deg + 1);

    RootSet out;
    out.roots.resize(deg);

    // initial moduli from the upper convex hull of (k, log|c_k|); this copes
    // with the enormous dynamic range of the coefficients
    std::vector<lcplx> z(deg);
    {
        std::vector<std::pair<int, long double>> pts;
        for (int k = 0; k <= deg; ++k) {
            const long double a = std::abs(c[k]);
            if (a > 0.0L) pts.emplace_back(k, std::log(a));
        }
        std::vector<std::pair<int, long double>> hull;
        for (const auto& pt : pts) {
            while (hull.size() >= 2) {
                const auto& u = hull[hull.size() - 2];
                const auto& v = hull[hull.size() - 1];
                const long double crossv = (long double)(v.first - u.first) * (pt.second - u.second) -
                                           (long double)(pt.first - u.first) * (v.second - u.second);
                if (crossv >= 0.0L)
                    hull.pop_back();
                else
                    break;
            }
            hull.push_back(pt);
        }
        int idx = 0;
        for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
            const auto [k1, y1] = hull[e];
            const auto [k2, y2] = hull[e + 1];
            const int m = k2 - k1;
            const long double r = std::exp((y1 - y2) / (long double)m);
            for (int i = 0; i < m && idx < deg; ++i, ++idx) {
                const long double th = 2.0L * std::numbers::pi_v<long double> * (i + 0.5L) / m +
                                       0.7L + 0.05L * (long double)e;
                z[idx] = r * lcplx(std::cos(th), std::sin(th));
            }
        }
        for (; idx < deg; ++idx)
            z[idx] = lcplx(0.5L, 0.3L) * lcplx((long double)(idx + 1), 0.0L) / lcplx((long double)deg);
    }

    // Aberth simultaneous iteration
    const int cap = 1000;
    int it = 0;
    for (; it < cap; ++it) {
        long double worst = 0.0L;
        for (int i = 0; i < deg; ++i) {
            const lcplx pv = horner(c, z[i]);
            const lcplx dv = horner_derivative(c, z[i]);
            if (std::abs(dv) == 0.0L) {
                z[i] += lcplx(1e-6L, 1e-6L);
                worst = 1.0L;
                continue;
            }
            const lcplx newton = pv / dv;
            lcplx rep = 0.0L;
            for (int j = 0; j < deg; ++j) {
                if (j == i) continue;
                const lcplx d = z[i] - z[j];
                if (std::abs(d) == 0.0L) continue;
                rep += lcplx(1.0L) / d;
            }
            const lcplx delta = newton / (lcplx(1.0L) - newton * rep);
            z[i] -= delta;
            worst = std::max(worst, (long double)(std::abs(delta) / (1.0L + std::abs(z[i]))));
        }
        if (worst < 2e-16L) break;
    }
    out.iterations = it;
    out.converged = it < cap;

    // Newton polish
    for (int i = 0; i < deg; ++i) {
        for (int k = 0; k < 3; ++k) {
            const lcplx pv = horner(c, z[i]);
            const lcplx dv = horner_derivative(c, z[i]);
            if (std::abs(dv) == 0.0L) break;
            z[i] -= pv / dv;
        }
    }

    double worst_rel = 0.0;
    for (int i = 0; i < deg; ++i) {
        out.roots[i] = cplx(double(z[i].real()), double(z[i].imag()));
        long double scale = 0.0L;
        long double zp = 1.0L;
        for (int k = 0; k <= deg; ++k) {
            scale += std::abs(c[k]) * zp;
            zp *= std::abs(z[i]);
        }
        if (scale == 0.0L) scale = 1.0L;
        worst_rel = std::max(worst_rel, double(std::abs(horner(c, z[i])) / scale));
    }
    out.residual = worst_rel;
    // the iteration cap alone is not fatal; uncertified roots are
    if (!out.converged && worst_rel > 1e-10)
        throw std::runtime_error("roots: iteration did not converge (worst scaled residual " +
                                 std::to_string(worst_rel) + ")");
    if (!out.converged) out.converged = true;

    // deterministic ordering
    std::sort(out.roots.begin(), out.roots.end(), [](cplx u, cplx v) {
        if (u.real() != v.real()) return u.real() < v.real();
        return u.imag() < v.imag();
    });
    return out;
}

cplx cauchy(const RootSet& rs, cplx z) {
    if (rs.roots.empty()) throw std::invalid_argument("cauchy: empty root set");
    cplx acc = 0.0;
    for (cplx r : rs.roots) {
        if (std::abs(z - r) < 1e-12) throw std::invalid_argument("cauchy: z coincides with a root");
        acc += 1.0 / (z - r);
    }
    return acc / double(rs.roots.size());
}

cplx cauchy_ratio(const PolySpec& spec, cplx z) {
    const cplx pv = spec.eval(z);
    if (std::abs(pv) == 0.0) throw std::invalid_argument("cauchy_ratio: z is a root");
    return spec.eval_derivative(z) / (double(spec.effective_degree) * pv);
}

double quadratic_residual(cplx A, cplx B, cplx z, cplx c) {
    return std::abs((1.0 - z * z) * c * c - ((A + B) * z + A - B) * c + A + B + 1.0);
}

MeasureComparison compare(cplx A, cplx B, int n, const CriticalGraph& graph) {
    if (graph.shorts.empty())
        throw std::invalid_argument("compare: critical graph has no short trajectory");
    MeasureComparison mc;
    mc.n = n;

    const PolySpec spec = build(n, double(n) * A, double(n) * B);
    const RootSet rs = roots(spec);

    double sum = 0.0, worst = 0.0;
    std::vector<double> dists;
    dists.reserve(rs.roots.size());
    for (cplx r : rs.roots) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& st : graph.shorts) d = std::min(d, distance_to_polyline(r, st.path));
        dists.push_back(d);
        sum += d;
        worst = std::max(worst, d);
    }
    mc.mean_dist = sum / double(dists.size());
    mc.max_dist = worst;
    for (double d : dists)
        if (d > 3.0 * mc.mean_dist) ++mc.outliers;

    mc.mass_check = graph.shorts.front().period.value / (2.0 * std::numbers::pi * cplx(0.0, 1.0));

    // quadratic-equation residual of the Cauchy transform on a far ring
    double rmax = 0.0;
    for (cplx r : rs.roots) rmax = std::max(rmax, std::abs(r));
    const double ring = std::max(4.0 * rmax, 3.0);
    for (int k = 0; k < 8; ++k) {
        const cplx z = ring * std::polar(1.0, 2.0 * std::numbers::pi * (k + 0.5) / 8.0);
        mc.cauchy_residuals.push_back(quadratic_residual(A, B, z, cauchy(rs, z)));
    }
    return mc;
}

}  // namespace qdt
