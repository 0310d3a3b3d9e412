#include "qdt/verify.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "qdt/branch.hpp"
#include "qdt/io.hpp"
#include "qdt/jacobi.hpp"
#include "qdt/periods.hpp"
#include "qdt/tracer.hpp"

namespace qdt::verify {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

CheckResult finish(const char* name, Stopwatch& sw, bool pass, std::string detail) {
    return CheckResult{name, pass, std::move(detail), sw.seconds()};
}

double urand(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

cplx cdisk(std::mt19937_64& rng, double radius) {
    while (true) {
        const double x = urand(rng, -radius, radius), y = urand(rng, -radius, radius);
        if (x * x + y * y <= radius * radius) return cplx(x, y);
    }
}

// (A, B) pair admissible for the parametrized family, with margins that keep
// the derived configuration well conditioned.
std::pair<cplx, cplx> sample_origin(std::mt19937_64& rng, double radius = 5.0) {
    while (true) {
        const cplx A = cdisk(rng, radius), B = cdisk(rng, radius);
        if (std::abs(A + B + 1.0) < 0.1 || std::abs(A + B + 2.0) < 0.1) continue;
        if (std::abs(A) < 0.1 || std::abs(B) < 0.1) continue;  // keeps zeros off the poles
        try {
            from_jacobi(A, B);
        } catch (const std::exception&) {
            continue;
        }
        const auto [zp, zm] = r_ab_zeros(A, B);
        const double unit = 1.0 + std::max(std::abs(zp), std::abs(zm));
        if (std::abs(zp - zm) < 1e-3 * unit) continue;
        bool near_pole = false;
        for (cplx z : {zp, zm})
            for (double pole : {-1.0, 1.0})
                if (std::abs(z - pole) < 1e-2) near_pole = true;
        if (near_pole) continue;
        return {A, B};
    }
}

// Generic triple with margins; by construction almost never satisfies the
// vanishing-imaginary-part criterion.
QDParams sample_generic(std::mt19937_64& rng) {
    while (true) {
        const cplx a = cdisk(rng, 2.2), b = cdisk(rng, 2.2);
        if (std::abs(a - b) < 0.25) continue;
        bool bad = false;
        for (cplx z : {a, b})
            for (double pole : {-1.0, 1.0})
                if (std::abs(z - pole) < 0.2) bad = true;
        if (bad) continue;
        const cplx lam = std::polar(urand(rng, 0.4, 2.5), urand(rng, -kPi, kPi));
        QDParams p = validate(a, b, lam);
        const PropertyPReport rep = property_p(p);
        double min_rel = 1e300;
        for (int k = 0; k < 4; ++k)
            min_rel = std::min(min_rel, std::abs(rep.im_parts[k]) / (1.0 + std::abs(rep.values[k])));
        if (min_rel < 1e-4) continue;  // keep away from the decision boundary
        return p;
    }
}

// Triple constructed so that exactly one of the four values is real: lambda
// is a purely imaginary multiple of the reciprocal of one bracket value.
QDParams sample_satisfying(std::mt19937_64& rng) {
    while (true) {
        const cplx a = cdisk(rng, 2.2), b = cdisk(rng, 2.2);
        if (std::abs(a - b) < 0.3) continue;
        bool bad = false;
        for (cplx z : {a, b})
            for (double pole : {-1.0, 1.0})
                if (std::abs(z - pole) < 0.25) bad = true;
        if (bad) continue;
        const cplx sx = std::sqrt((1.0 - a) * (1.0 - b));
        const cplx sy = std::sqrt((1.0 + a) * (1.0 + b));
        const int s1 = rng() & 1 ? +1 : -1;
        const int s2 = rng() & 1 ? +1 : -1;
        const cplx w = double(s1) * sx + double(s2) * sy - 2.0;
        if (std::abs(w) < 0.3) continue;
        const double r = urand(rng, 0.8, 2.0);
        const cplx lam = kI * r / w;
        if (std::abs(lam) < 0.05 || std::abs(lam) > 20.0) continue;
        QDParams p = validate(a, b, lam);
        const PropertyPReport rep = property_p(p);
        if (!rep.satisfied || rep.satisfied_classes.size() != 1) continue;
        // other classes must stay clearly away from the boundary
        bool boundary = false;
        for (int k = 0; k < 4; ++k) {
            if (k == rep.satisfied_classes.front()) continue;
            if (std::abs(rep.im_parts[k]) < 1e-4 * (1.0 + std::abs(rep.values[k]))) boundary = true;
        }
        if (boundary) continue;
        return p;
    }
}

std::string describe(const QDParams& p) {
    std::string s = "a=" + format_complex(p.a) + " b=" + format_complex(p.b) +
                    " lambda=" + format_complex(p.lambda);
    if (p.origin)
        s += " (A=" + format_complex(p.origin->A) + " B=" + format_complex(p.origin->B) + ")";
    return s;
}

}  // namespace

CheckResult check_algebraic_identities(int samples, std::uint64_t seed, const Tolerances& tol) {
    Stopwatch sw;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < samples; ++i) {
        const auto [A, B] = sample_origin(rng);
        const auto [zp, zm] = r_ab_zeros(A, B);
        const cplx s2 = (A + B + 2.0) * (A + B + 2.0);
        const double coeff_scale =
            std::abs(s2) * (1.0 + std::norm(zp) + std::norm(zm)) + std::abs(4.0 * (A + B + 1.0));
        auto relroot = [&](cplx v) { return std::abs(v) / coeff_scale; };
        std::ostringstream fail;
        if (relroot(r_ab(A, B, zp)) > tol.tol_root) fail << "R(zeta+) != 0";
        if (relroot(r_ab(A, B, zm)) > tol.tol_root) fail << " R(zeta-) != 0";
        const cplx r1 = r_ab(A, B, 1.0), rm1 = r_ab(A, B, -1.0);
        if (std::abs(r1 - 4.0 * A * A) > tol.tol_root * (1.0 + std::abs(r1))) fail << " R(1) != 4A^2";
        if (std::abs(rm1 - 4.0 * B * B) > tol.tol_root * (1.0 + std::abs(rm1))) fail << " R(-1) != 4B^2";
        // squared forms avoid the square-root branch ambiguity
        const cplx lhs_p = s2 * (zp - 1.0) * (zm - 1.0);
        const cplx lhs_m = s2 * (zp + 1.0) * (zm + 1.0);
        if (std::abs(lhs_p - 4.0 * A * A) > tol.tol_root * (1.0 + std::abs(lhs_p)))
            fail << " (A+B+2)^2(z+-1)(z--1) != 4A^2";
        if (std::abs(lhs_m - 4.0 * B * B) > tol.tol_root * (1.0 + std::abs(lhs_m)))
            fail << " (A+B+2)^2(z++1)(z-+1) != 4B^2";
        // each closed-form value must match a named class value up to sign
        const QDParams p = from_jacobi(A, B);
        const PropertyPReport rep = property_p(p, tol);
        const cplx named[4] = {cplx(1.0), A + 1.0, B + 1.0, A + B + 1.0};
        for (int k = 0; k < 4; ++k) {
            double best = 1e300;
            for (const cplx& c : named)
                best = std::min({best, std::abs(rep.values[k] - 2.0 * kPi * c),
                                 std::abs(rep.values[k] + 2.0 * kPi * c)});
            if (best > tol.tol_root * 1e2 * (1.0 + std::abs(rep.values[k])))
                fail << " value " << k << " outside the named class set";
        }
        if (!fail.str().empty())
            return finish("algebraic-identities", sw, false,
                          fail.str() + " at A=" + format_complex(A) + " B=" + format_complex(B));
    }
    return finish("algebraic-identities", sw, true, std::to_string(samples) + " samples");
}

CheckResult check_property_p_symmetries(int samples, std::uint64_t seed, const Tolerances& tol) {
    Stopwatch sw;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < samples; ++i) {
        const QDParams p = (i % 2 == 0) ? sample_generic(rng) : sample_satisfying(rng);
        const PropertyPReport r0 = property_p(p, tol);
        const PropertyPReport r1 = property_p(validate(p.b, p.a, p.lambda), tol);
        const PropertyPReport r2 =
            property_p(validate(std::conj(p.a), std::conj(p.b), std::conj(p.lambda)), tol);
        if (r0.satisfied != r1.satisfied)
            return finish("property-p-symmetries", sw, false, "swap a<->b changed the verdict at " + describe(p));
        if (r0.satisfied != r2.satisfied)
            return finish("property-p-symmetries", sw, false, "joint conjugation changed the verdict at " + describe(p));
    }
    return finish("property-p-symmetries", sw, true, std::to_string(samples) + " samples");
}

CheckResult check_branch_monodromy(int samples, std::uint64_t seed, const Tolerances& tol) {
    Stopwatch sw;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < samples; ++i) {
        const QDParams p = sample_generic(rng);
        // random circle avoiding the zeros by a margin
        cplx center;
        double radius = 0.0;
        int kind = int(rng() % 3);  // 0: one zero, 1: both, 2: none
        bool ok = false;
        for (int attempt = 0; attempt < 50 && !ok; ++attempt) {
            center = cdisk(rng, 3.0);
            radius = urand(rng, 0.15, 2.5);
            const double da = std::abs(center - p.a), db = std::abs(center - p.b);
            const double margin = 0.08;
            const bool ina = da < radius - margin, inb = db < radius - margin;
            const bool outa = da > radius + margin, outb = db > radius + margin;
            if (kind == 0) ok = (ina && outb) || (inb && outa);
            if (kind == 1) ok = ina && inb;
            if (kind == 2) ok = outa && outb;
        }
        if (!ok) continue;
        const PathPolyline loop = circle_polyline(center, radius, 96, rng() & 1);
        const BranchState start{loop.pts.front(), std::sqrt(p.phi(loop.pts.front()))};
        const BranchState end = continue_along(p, start, loop, 0.0);
        const bool flipped = std::abs(end.s - start.s) > std::abs(end.s + start.s);
        const bool odd = kind == 0;
        if (flipped != odd)
            return finish("branch-monodromy", sw, false,
                          "monodromy mismatch (kind " + std::to_string(kind) + ") at " + describe(p));
        // the continued value must square back to phi
        if (std::abs(end.s * end.s - p.phi(end.z)) >
            tol.tol_branch * 1e2 * (1.0 + std::abs(p.phi(end.z))))
            return finish("branch-monodromy", sw, false, "square defect after continuation");
    }
    return finish("branch-monodromy", sw, true, std::to_string(samples) + " loops");
}

CheckResult check_branch_step_stability(std::uint64_t seed, const Tolerances&) {
    Stopwatch sw;
    std::mt19937_64 rng(seed);
    const QDParams p = sample_generic(rng);
    // diameter crossing the configuration, sampled at two densities
    const cplx z0 = p.a + 2.5 * (p.a - p.b) / std::abs(p.a - p.b) * cplx(0.0, 1.0);
    const cplx z1 = 2.0 * p.b - z0;
    auto sample_path = [&](int n) {
        std::vector<cplx> pts;
        for (int k = 0; k <= n; ++k) pts.push_back(z0 + (z1 - z0) * (double(k) / n));
        return PathPolyline::from_points(std::move(pts));
    };
    const BranchState start{z0, std::sqrt(p.phi(z0))};
    const BranchState coarse = continue_along(p, start, sample_path(64), 0.0);
    const BranchState fine = continue_along(p, start, sample_path(128), 0.0);
    const BranchState finest = continue_along(p, start, sample_path(640), 0.0);
    const double d1 = std::abs(coarse.s - fine.s) / (1.0 + std::abs(fine.s));
    const double d2 = std::abs(fine.s - finest.s) / (1.0 + std::abs(finest.s));
    if (d1 > 1e-12 || d2 > 1e-12)
        return finish("branch-step-stability", sw, false,
                      "densified continuation moved the endpoint by " + format_double(std::max(d1, d2)));
    return finish("branch-step-stability", sw, true, "endpoint stable under 2x and 10x densification");
}

namespace {

struct LoopOracle {
    cplx direct, predicted;
    double tol_used;
};

// Winding-weighted residue sum for a circle that winds around no zeros or
// around both; the branch at each enclosed pole is continued from the loop's
// start point.
LoopOracle loop_residue_oracle(const QDParams& p, const PathPolyline& loop, const Tolerances& tol) {
    PeriodReport rep = loop_period(p, loop, tol);
    cplx predicted = 0.0;
    if (rep.winding_a == 0 && rep.winding_b == 0) {
        const BranchState start{loop.pts.front(), std::sqrt(p.phi(loop.pts.front()))};
        for (int sign : {-1, +1}) {
            const cplx pole(double(sign), 0.0);
            const int w = sign < 0 ? rep.winding_minus1 : rep.winding_plus1;
            if (w == 0) continue;
            const BranchState at_pole = continue_straight(p, start, pole, -1.0);
            const cplx res = at_pole.s / (2.0 * pole);  // residue of sqrt(phi)/(t^2-1)
            predicted += 2.0 * kPi * kI * double(w) * res;
        }
    } else if (rep.winding_a == rep.winding_b && rep.winding_a == rep.winding_minus1 &&
               rep.winding_a == rep.winding_plus1) {
        // everything enclosed: only the residue at infinity remains outside
        predicted = 2.0 * kPi * kI * p.lambda * double(rep.winding_a);
    } else {
        throw std::runtime_error("loop oracle: unsupported winding pattern");
    }
    return {rep.value, predicted, 0.0};
}

}  // namespace

CheckResult check_residue_theorem(int loops, std::uint64_t seed, double tol_abs, const Tolerances& tol) {
    Stopwatch sw;
    std::mt19937_64 rng(seed);
    int done = 0;
    while (done < loops) {
        const QDParams p = sample_generic(rng);
        const int archetype = int(rng() % 4);  // 0:+1, 1:-1, 2:none, 3:everything
        cplx center;
        double radius;
        switch (archetype) {
            case 0: center = cplx(1.0, 0.0) + cdisk(rng, 0.05); radius = urand(rng, 0.1, 0.35); break;
            case 1: center = cplx(-1.0, 0.0) + cdisk(rng, 0.05); radius = urand(rng, 0.1, 0.35); break;
            case 2: center = cplx(0.0, 4.5) + cdisk(rng, 0.5); radius = urand(rng, 0.3, 1.0); break;
            default: center = cdisk(rng, 0.2); radius = urand(rng, 7.0, 12.0); break;
        }
        // the loop must stay clear of zeros, and enclose them only for the
        // outermost archetype
        bool ok = true;
        for (cplx z : {p.a, p.b}) {
            const double d = std::abs(z - center);
            if (std::abs(d - radius) < 0.1) ok = false;
            if (archetype != 3 && d < radius) ok = false;
        }
        for (cplx pole : {cplx(-1.0, 0.0), cplx(1.0, 0.0)}) {
            const double d = std::abs(pole - center);
            if (std::abs(d - radius) < 0.08) ok = false;
            if (archetype == 2 && d < radius) ok = false;
        }
        if (!ok) continue;
        const PathPolyline loop = circle_polyline(center, radius, 128, rng() & 1);
        LoopOracle oracle;
        try {
            oracle = loop_residue_oracle(p, loop, tol);
        } catch (const std::exception&) {
            continue;
        }
        if (std::abs(oracle.direct - oracle.predicted) > tol_abs)
            return finish("residue-theorem", sw, false,
                          "quadrature " + format_complex(oracle.direct) + " vs residue sum " +
                              format_complex(oracle.predicted) + " at " + describe(p));
        ++done;
    }
    return finish("residue-theorem", sw, true, std::to_string(loops) + " loops within " + format_double(tol_abs));
}

CheckResult check_quadrature_convergence(const Tolerances& tol) {
    Stopwatch sw;
    const QDParams p = validate(2.0, 3.0, 1.0);
    // curvy analytic sub-arc near the pole at 1
    std::vector<cplx> pts;
    for (int k = 0; k <= 6; ++k) {
        const double th = kPi * (0.15 + 0.7 * k / 6.0);
        pts.push_back(cplx(1.0, 0.0) + 0.45 * std::polar(1.0, th));
    }
    const PathPolyline arc = PathPolyline::from_points(std::move(pts));
    const cplx seed = std::sqrt(p.phi(arc.pts.front()));
    const cplx i1 = chain_integral_fixed(p, arc, seed, 1);
    const cplx i2 = chain_integral_fixed(p, arc, seed, 2);
    const cplx i4 = chain_integral_fixed(p, arc, seed, 4);
    const double d12 = std::abs(i1 - i2), d24 = std::abs(i2 - i4);
    if (!(d24 * 8.0 <= d12 + 1e-15))
        return finish("quadrature-convergence", sw, false,
                      "halving gain " + format_double(d12 / std::max(d24, 1e-300)) + " below 8");
    // the adaptive error estimate must bound the distance to a finer value
    PeriodReport rep = arc_period(p, arc, false, tol);
    const cplx ref = chain_integral_fixed(p, arc, seed, 32);
    const double true_err = std::min(std::abs(rep.value - ref), std::abs(rep.value + ref));
    if (true_err > std::max(rep.est_error * 3.0, 1e-12))
        return finish("quadrature-convergence", sw, false,
                      "estimate " + format_double(rep.est_error) + " does not cover " +
                          format_double(true_err));
    return finish("quadrature-convergence", sw, true,
                  "halving gain " + format_double(d12 / std::max(d24, 1e-300)));
}

namespace {

// Arc from a to b detouring around a set of poles on a circle, used to reach
// all four winding archetypes.
PathPolyline detour_arc(const QDParams& p, bool around_minus1, bool around_plus1, int orient,
                        double radius_pad) {
    if (!around_minus1 && !around_plus1) {
        const cplx mid = 0.5 * (p.a + p.b) + radius_pad * 0.15 * kI * (p.b - p.a) / std::abs(p.b - p.a);
        return PathPolyline::from_points({p.a, mid, p.b});
    }
    cplx c = 0.0;
    int n_poles = 0;
    if (around_minus1) { c += cplx(-1.0, 0.0); ++n_poles; }
    if (around_plus1) { c += cplx(1.0, 0.0); ++n_poles; }
    c /= double(n_poles);
    double radius = 0.0;
    if (around_minus1) radius = std::max(radius, std::abs(cplx(-1.0, 0.0) - c));
    if (around_plus1) radius = std::max(radius, std::abs(cplx(1.0, 0.0) - c));
    radius += 0.4 + radius_pad;

    const double tha = std::arg(p.a - c);
    const double thb = std::arg(p.b - c) - 0.2 * orient;  // offset avoids self-touching
    double span = thb - tha;
    if (orient > 0)
        while (span <= 0.0) span += 2.0 * kPi;
    else
        while (span >= 0.0) span -= 2.0 * kPi;

    std::vector<cplx> pts{p.a, c + radius * std::polar(1.0, tha)};
    const int n_arc = 48;
    for (int k = 1; k <= n_arc; ++k)
        pts.push_back(c + radius * std::polar(1.0, tha + span * double(k) / n_arc));
    pts.push_back(p.b);
    return PathPolyline::from_points(std::move(pts));
}

}  // namespace

CheckResult check_arc_class_coverage(int arcs, std::uint64_t seed, double tol_abs, const Tolerances& tol) {
    Stopwatch sw;
    std::mt19937_64 rng(seed);
    bool archetype_seen[2][2] = {{false, false}, {false, false}};
    int done = 0;
    int guard = 0;
    while (done < arcs && guard < 10 * arcs + 100) {
        ++guard;
        const auto [A, B] = sample_origin(rng, 3.0);
        const QDParams p = from_jacobi(A, B);
        const bool am = rng() & 1, ap = rng() & 1;
        const int orient = rng() & 1 ? +1 : -1;
        PathPolyline arc = detour_arc(p, am, ap, orient, urand(rng, 0.0, 0.6));
        // reject arcs running too close to a critical point
        bool ok = true;
        for (std::size_t i = 0; i + 1 < arc.pts.size() && ok; ++i) {
            for (cplx pole : {cplx(-1.0, 0.0), cplx(1.0, 0.0)})
                if (point_segment_distance(pole, arc.pts[i], arc.pts[i + 1]) < 0.1) ok = false;
            for (cplx zero : {p.a, p.b}) {
                if (std::abs(arc.pts[i] - zero) < 1e-12 || std::abs(arc.pts[i + 1] - zero) < 1e-12)
                    continue;
                if (point_segment_distance(zero, arc.pts[i], arc.pts[i + 1]) < 2e-2 * p.scale())
                    ok = false;
            }
        }
        if (!ok) continue;
        PeriodReport rep;
        try {
            rep = classify_arc(p, arc, tol);
        } catch (const std::exception&) {
            continue;
        }
        if (!rep.matched)
            return finish("arc-class-coverage", sw, false,
                          "period " + format_complex(rep.value) + " matched no class at A=" +
                              format_complex(A) + " B=" + format_complex(B));
        const double diff = std::abs(rep.value - double(rep.matched_sign) * rep.class_value);
        if (diff > tol_abs)
            return finish("arc-class-coverage", sw, false,
                          "matched class off by " + format_double(diff) + " at A=" + format_complex(A) +
                              " B=" + format_complex(B));
        archetype_seen[std::abs(rep.winding_minus1) % 2][std::abs(rep.winding_plus1) % 2] = true;
        ++done;
    }
    if (done < arcs) return finish("arc-class-coverage", sw, false, "sample generation starved");
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (!archetype_seen[i][j])
                return finish("arc-class-coverage", sw, false, "winding archetype not covered");
    return finish("arc-class-coverage", sw, true, std::to_string(done) + " arcs, all archetypes");
}

CheckResult check_arc_antisymmetry(std::uint64_t seed, const Tolerances& tol) {
    Stopwatch sw;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 6; ++i) {
        const auto [A, B] = sample_origin(rng, 3.0);
        const QDParams p = from_jacobi(A, B);
        const PathPolyline arc = detour_arc(p, rng() & 1, rng() & 1, rng() & 1 ? 1 : -1, 0.2);
        PeriodReport fwd, rev;
        try {
            fwd = arc_period(p, arc, true, tol);
            rev = arc_period(p, arc.reversed(), true, tol);
        } catch (const std::exception&) {
            continue;
        }
        const double defect = std::abs(fwd.value + rev.value);
        if (defect > 1e-8 * (1.0 + std::abs(fwd.value)))
            return finish("arc-antisymmetry", sw, false,
                          "reversal defect " + format_double(defect) + " at A=" + format_complex(A) +
                              " B=" + format_complex(B));
    }
    return finish("arc-antisymmetry", sw, true, "reversal negates the period");
}

CheckResult check_trajectory_invariant(const Tolerances& tol) {
    Stopwatch sw;
    const std::pair<cplx, cplx> cases[] = {
        {cplx(2.0, 0.0), cplx(3.0, 0.0)},
        {cplx(1.0, 0.1), cplx(-1.0, 0.1)},
        {cplx(-1.1, 0.1), cplx(1.0, 0.0)},
    };
    for (auto [A, B] : cases) {
        const QDParams p = from_jacobi(A, B);
        const CriticalGraph g = build_graph(p);
        const double scale = p.scale();
        for (const auto& t : g.trajectories) {
            const double bound = tol.tol_traj * scale * (1.0 + t.arclength);
            if (t.im_defect > bound)
                return finish("trajectory-invariant", sw, false,
                              "defect " + format_double(t.im_defect) + " above " +
                                  format_double(bound) + " at A=" + format_complex(A) +
                                  " B=" + format_complex(B));
        }
        for (const auto& st : g.shorts) {
            const double bound = tol.tol_traj * scale * (1.0 + st.path.length());
            const double d = im_defect(p, st.path);
            if (d > bound)
                return finish("trajectory-invariant", sw, false,
                              "short defect " + format_double(d) + " above " + format_double(bound));
        }
    }
    return finish("trajectory-invariant", sw, true, "all traced polylines within bound");
}

CheckResult check_step_halving(const Tolerances&) {
    Stopwatch sw;
    const QDParams p = from_jacobi(cplx(-1.1, 0.1), cplx(1.0, 0.0));
    const LaunchSpec spec = launch_directions(p, p.a);
    StepLimits base;
    StepLimits tight = base;
    tight.rtol /= 2.0;
    tight.atol_scales /= 2.0;
    for (int k = 0; k < 3; ++k) {
        const cplx dir = std::polar(1.0, spec.angles[k]);
        const cplx start = spec.zero + base.eps_launch_scales * p.scale() * dir;
        const TrajectoryRecord t1 = trace(p, start, dir, base);
        const TrajectoryRecord t2 = trace(p, start, dir, tight);
        if (t1.fate != t2.fate) continue;  // detector changes are not step error
        if (t1.fate != Fate::ToPolePlus1 && t1.fate != Fate::ToPoleMinus1) continue;
        const double moved = std::abs(t1.polyline.pts.back() - t2.polyline.pts.back());
        if (moved >= 10.0 * std::max(t1.est_error, 1e-14 * p.scale()))
            return finish("step-halving", sw, false,
                          "terminal moved " + format_double(moved) + " against estimate " +
                              format_double(t1.est_error));
    }
    return finish("step-halving", sw, true, "terminal movement within 10x estimate");
}

CheckResult check_fate_residue_consistency(const Tolerances& tol) {
    Stopwatch sw;
    const std::pair<cplx, cplx> cases[] = {
        {cplx(2.0, 0.0), cplx(3.0, 0.0)},
        {cplx(1.0, 0.1), cplx(-1.0, 0.1)},
        {cplx(1.0, 0.1), cplx(-1.0, -0.1)},
        {cplx(-1.1, 0.1), cplx(1.0, 0.0)},
        {cplx(-2.0, 0.0), cplx(3.0, 0.0)},
    };
    for (auto [A, B] : cases) {
        const QDParams p = from_jacobi(A, B);
        const CriticalGraph g = build_graph(p);
        for (const auto& t : g.trajectories) {
            if (t.fate == Fate::ToPoleMinus1 && g.pole_types.at_minus1 == PoleType::Circle)
                return finish("fate-residue-consistency", sw, false,
                              "trajectory entered a circle-type pole at -1, A=" + format_complex(A));
            if (t.fate == Fate::ToPolePlus1 && g.pole_types.at_plus1 == PoleType::Circle)
                return finish("fate-residue-consistency", sw, false,
                              "trajectory entered a circle-type pole at +1, A=" + format_complex(A));
            if (t.fate == Fate::ToInfinity && g.pole_types.at_inf == PoleType::Circle)
                return finish("fate-residue-consistency", sw, false,
                              "trajectory diverged into a circle-type pole at infinity");
        }
    }
    (void)tol;
    return finish("fate-residue-consistency", sw, true, "no trajectory enters a circle-type pole");
}

CheckResult check_existence_equivalence(int samples, std::uint64_t seed, const Tolerances& tol,
                                        std::ostream* progress) {
    Stopwatch sw;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < samples; ++i) {
        const QDParams p = (i % 2 == 0) ? sample_generic(rng) : sample_satisfying(rng);
        CriticalGraph g;
        try {
            g = build_graph(p, StepLimits{}, tol);
        } catch (const std::exception& e) {
            return finish("existence-equivalence", sw, false,
                          std::string("graph build failed: ") + e.what() + " at " + describe(p));
        }
        const bool analytic = g.prop_p.satisfied;
        const bool geometric = !g.shorts.empty();
        if (analytic != geometric)
            return finish("existence-equivalence", sw, false,
                          std::string("verdicts disagree (analytic ") + (analytic ? "yes" : "no") +
                              ", geometric " + (geometric ? "yes" : "no") + ") at " + describe(p));
        if (progress && (i + 1) % 10 == 0)
            *progress << "  existence-equivalence: " << (i + 1) << "/" << samples << "\n";
    }
    return finish("existence-equivalence", sw, true, std::to_string(samples) + " triples agree");
}

CheckResult check_homotopy_distinctness(const Tolerances& tol) {
    Stopwatch sw;
    const QDParams p = from_jacobi(cplx(1.0, 0.1), cplx(-1.0, -0.1));
    const CriticalGraph g = build_graph(p, StepLimits{}, tol);
    if (g.shorts.size() != 2)
        return finish("homotopy-distinctness", sw, false,
                      "expected two shorts, found " + std::to_string(g.shorts.size()));
    const auto& s0 = g.shorts[0].period;
    const auto& s1 = g.shorts[1].period;
    if (s0.matched_class == s1.matched_class)
        return finish("homotopy-distinctness", sw, false,
                      "both shorts matched class " + s0.matched_class);
    return finish("homotopy-distinctness", sw, true,
                  "classes " + s0.matched_class + " and " + s1.matched_class);
}

CheckResult check_jacobi_dual_formula(int samples, std::uint64_t seed, const Tolerances&) {
    Stopwatch sw;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < samples; ++i) {
        const int n = 2 + int(rng() % 63);
        const cplx alpha = cdisk(rng, 3.0) * double(n);
        const cplx beta = cdisk(rng, 3.0) * double(n);
        PolySpec spec;
        RootSet rs;
        try {
            spec = build(n, alpha, beta);
            if (spec.effective_degree < 1) continue;
            rs = roots(spec);
        } catch (const std::exception&) {
            continue;
        }
        double rmax = 0.0;
        for (cplx r : rs.roots) rmax = std::max(rmax, std::abs(r));
        const cplx z = (2.0 * rmax + 2.0) * std::polar(1.0, urand(rng, -kPi, kPi));
        const cplx c_sum = cauchy(rs, z);
        const cplx c_ratio = cauchy_ratio(spec, z);
        if (std::abs(c_sum - c_ratio) > 1e-9 * (1.0 + std::abs(c_ratio)))
            return finish("jacobi-dual-formula", sw, false,
                          "sum and ratio forms disagree at n=" + std::to_string(n));
    }
    return finish("jacobi-dual-formula", sw, true, std::to_string(samples) + " specs");
}

CheckResult check_jacobi_rodrigues(const Tolerances&) {
    Stopwatch sw;
    // n-th derivative by a trapezoid Cauchy integral on a circle inside the
    // domain where the principal powers are analytic
    auto derivative = [](auto&& f, cplx z0, int n, double radius) {
        const int m = 96;
        cplx acc = 0.0;
        for (int k = 0; k < m; ++k) {
            const double th = 2.0 * kPi * k / m;
            const cplx w = radius * std::polar(1.0, th);
            acc += f(z0 + w) / std::pow(w, n) ;
        }
        double fact = 1.0;
        for (int k = 2; k <= n; ++k) fact *= k;
        return acc * fact / double(m);
    };
    const cplx samples[5] = {cplx(1.8, 0.9), cplx(2.3, -0.6), cplx(0.4, 1.7), cplx(-0.9, 1.9),
                             cplx(3.0, 0.8)};
    for (int n = 1; n <= 6; ++n) {
        const cplx alpha(0.7, 0.3), beta(-0.4, 0.8);
        const PolySpec spec = build(n, alpha, beta);
        for (cplx z0 : samples) {
            const double radius = 0.3 * std::min(std::abs(z0 - 1.0), std::abs(z0 + 1.0));
            auto f = [&](cplx z) {
                return std::pow(z - 1.0, double(n) + alpha) * std::pow(z + 1.0, double(n) + beta);
            };
            const cplx dn = derivative(f, z0, n, radius);
            double fact = 1.0;
            for (int k = 2; k <= n; ++k) fact *= k;
            const cplx rodrigues = dn / (std::pow(2.0, n) * fact) * std::pow(z0 - 1.0, -alpha) *
                                   std::pow(z0 + 1.0, -beta);
            const cplx direct = spec.eval(z0);
            if (std::abs(rodrigues - direct) > 1e-6 * (1.0 + std::abs(direct)))
                return finish("jacobi-rodrigues", sw, false,
                              "mismatch at n=" + std::to_string(n) + " z=" + format_complex(z0));
        }
    }
    return finish("jacobi-rodrigues", sw, true, "n <= 6 at 5 sample points");
}

CheckResult check_jacobi_root_residuals(std::uint64_t seed, const Tolerances&) {
    Stopwatch sw;
    std::mt19937_64 rng(seed);
    for (int n : {8, 32, 64, 128}) {
        const cplx alpha = cdisk(rng, 2.0) * double(n);
        const cplx beta = cdisk(rng, 2.0) * double(n);
        PolySpec spec;
        RootSet rs;
        try {
            spec = build(n, alpha, beta);
            rs = roots(spec);
        } catch (const std::exception& e) {
            return finish("jacobi-root-residuals", sw, false,
                          "failed at n=" + std::to_string(n) + ": " + e.what());
        }
        if (rs.residual > 1e-8)
            return finish("jacobi-root-residuals", sw, false,
                          "residual " + format_double(rs.residual) + " at n=" + std::to_string(n));
    }
    return finish("jacobi-root-residuals", sw, true, "certified to 1e-8 up to n=128");
}

CheckResult check_jacobi_far_field(std::uint64_t seed, const Tolerances&) {
    Stopwatch sw;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 10; ++i) {
        const int n = 2 + int(rng() % 24);
        PolySpec spec;
        RootSet rs;
        try {
            spec = build(n, cdisk(rng, 2.0) * double(n), cdisk(rng, 2.0) * double(n));
            rs = roots(spec);
        } catch (const std::exception&) {
            continue;
        }
        double rmax = 0.0;
        for (cplx r : rs.roots) rmax = std::max(rmax, std::abs(r));
        for (int k = 0; k < 6; ++k) {
            const cplx z = std::max(4.0 * rmax, 1e-6) * std::polar(1.0, urand(rng, -kPi, kPi));
            const double lhs = std::abs(z * cauchy(rs, z) - 1.0);
            if (lhs > 2.0 * rmax / std::abs(z) + 1e-12)
                return finish("jacobi-far-field", sw, false,
                              "far-field bound violated at n=" + std::to_string(n));
        }
    }
    return finish("jacobi-far-field", sw, true, "|z C(z) - 1| within 2 max|root| / |z|");
}

CheckResult check_teich_instances() {
    Stopwatch sw;
    // two zero corners with inner angle 2*pi/3 and empty interior
    const QDPolygon lens{{{1, 2.0 * kPi / 3.0}, {1, 2.0 * kPi / 3.0}}, {}};
    const TeichResult t1 = teich_check(lens);
    if (!(t1.lhs == 0.0 && t1.rhs == 2.0 && !t1.consistent))
        return CheckResult{"teich-instances", false, "lens case evaluated wrong", sw.seconds()};
    // loop through one zero around a double pole
    const QDPolygon loop{{{1, 2.0 * kPi / 3.0}}, {-2}};
    const TeichResult t2 = teich_check(loop);
    if (!(std::abs(t2.lhs) < 1e-15 && t2.rhs == 0.0 && t2.consistent))
        return CheckResult{"teich-instances", false, "pole-loop case evaluated wrong", sw.seconds()};
    // closed regular trajectory around a double pole
    const QDPolygon ring{{}, {-2}};
    const TeichResult t3 = teich_check(ring);
    if (!(t3.lhs == 0.0 && t3.rhs == 0.0 && t3.consistent))
        return CheckResult{"teich-instances", false, "ring case evaluated wrong", sw.seconds()};
    return CheckResult{"teich-instances", true, "both computed polygon instances match", sw.seconds()};
}

std::vector<CheckResult> run_all(std::uint64_t seed, const Tolerances& tol, std::ostream* progress) {
    std::vector<CheckResult> out;
    auto push = [&](CheckResult r) {
        if (progress)
            *progress << (r.pass ? "[pass] " : "[FAIL] ") << r.name << " (" << format_double(r.seconds)
                      << " s) " << r.detail << "\n";
        out.push_back(std::move(r));
    };
    push(check_algebraic_identities(100, seed, tol));
    push(check_property_p_symmetries(50, seed + 1, tol));
    push(check_branch_monodromy(40, seed + 2, tol));
    push(check_branch_step_stability(seed + 3, tol));
    push(check_residue_theorem(20, seed + 4, 1e-8, tol));
    push(check_quadrature_convergence(tol));
    push(check_arc_class_coverage(20, seed + 5, 1e-7, tol));
    push(check_arc_antisymmetry(seed + 6, tol));
    push(check_trajectory_invariant(tol));
    push(check_step_halving(tol));
    push(check_fate_residue_consistency(tol));
    push(check_homotopy_distinctness(tol));
    push(check_jacobi_dual_formula(24, seed + 7, tol));
    push(check_jacobi_rodrigues(tol));
    push(check_jacobi_root_residuals(seed + 8, tol));
    push(check_jacobi_far_field(seed + 9, tol));
    push(check_teich_instances());
    push(check_existence_equivalence(50, seed + 10, tol, progress));
    return out;
}

}  // namespace qdt::verify
