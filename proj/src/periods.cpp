#include "qdt/periods.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qdt/io.hpp"

namespace qdt {

namespace {

constexpr cplx kI{0.0, 1.0};

// Gauss-Legendre 7-point rule on [-1, 1].
constexpr double kGx[7] = {-0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
                           0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
constexpr double kGw[7] = {0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
                           0.4179591836734694, 0.3818300505051189, 0.2797053914892766,
                           0.1294849661688697};

cplx safe_nearest_sqrt(cplx w, cplx ref) {
    const cplx r = std::sqrt(w);
    const double dot = r.real() * ref.real() + r.imag() * ref.imag();
    return dot >= 0.0 ? r : -r;
}

struct Chain {
    const QDParams* p;
    cplx z, s;  // current branch state of sqrt(phi)

    void advance(cplx z1, int depth = 0) {
        const cplx phi1 = p->phi(z1);
        const cplx phi0 = s * s;
        // phase test is only valid for steps short against the distance to
        // the branch points (arg wraps unobserved otherwise)
        const double step_len = std::abs(z1 - z);
        const double zero_dist = std::min({std::abs(z - p->a), std::abs(z - p->b),
                                           std::abs(z1 - p->a), std::abs(z1 - p->b)});
        const cplx ratio = phi1 / phi0;
        if (step_len > 0.5 * zero_dist || std::abs(std::arg(ratio)) > std::numbers::pi / 2.0 ||
            std::abs(ratio) > 16.0 || std::abs(ratio) < 1.0 / 16.0) {
            if (depth > 80) throw std::runtime_error("period quadrature: branch subdivision failed");
            const cplx mid = 0.5 * (z + z1);
            advance(mid, depth + 1);
            advance(z1, depth + 1);
            return;
        }
        z = z1;
        s = safe_nearest_sqrt(phi1, s);
    }

    cplx integrand() const { return s / (z * z - 1.0); }
};

// One 7-point panel from the chain's position to z1; advances the chain.
cplx panel(Chain& ch, cplx z1) {
    const cplx z0 = ch.z;
    const cplx mid = 0.5 * (z0 + z1), half = 0.5 * (z1 - z0);
    cplx acc = 0.0;
    for (int i = 0; i < 7; ++i) {
        ch.advance(mid + kGx[i] * half);
        acc += kGw[i] * ch.integrand();
    }
    ch.advance(z1);
    return acc * half;
}

cplx adaptive_segment(Chain& ch, cplx z1, double eps, double* err, int depth = 0) {
    Chain probe = ch;
    const cplx whole = panel(probe, z1);
    Chain fine = ch;
    const cplx zm = 0.5 * (ch.z + z1);
    const cplx left = panel(fine, zm);
    const cplx right = panel(fine, z1);
    const double diff = std::abs(whole - (left + right));
    if (diff <= eps || depth >= 24) {
        *err += diff;
        ch = fine;
        return left + right;
    }
    const cplx l = adaptive_segment(ch, zm, eps / 2.0, err, depth + 1);
    const cplx r = adaptive_segment(ch, z1, eps / 2.0, err, depth + 1);
    return l + r;
}

// Integral from the zero out to the chain's position, via t = zero + d*u^2.
// The chain must sit at the regular endpoint; its state seeds the reduced
// square root. Callers negate when the arc runs into the zero instead.
cplx singular_segment(const QDParams& p, const Chain& ch, cplx zero, cplx other_zero, double* err) {
    const cplx d = ch.z - zero;  // regular endpoint relative to the zero
    // phi(t(u)) = u^2 * H(u) with H(u) = lambda^2 d (t(u) - other_zero)
    auto h_of = [&](cplx t) { return p.lambda * p.lambda * d * (t - other_zero); };
    const cplx h_ref = ch.s;  // sqrt(H)(1) = sqrt(phi)(regular end) since u=1 there
    auto eval = [&](double u, cplx& ref) {
        const cplx t = zero + d * (u * u);
        const cplx h = safe_nearest_sqrt(h_of(t), ref);
        ref = h;
        return 2.0 * d * (u * u) * h / (t * t - 1.0);
    };
    auto composite = [&](int n_panels) {
        cplx ref = h_ref;
        cplx acc = 0.0;
        // march u downward from 1 so the branch is seeded at the junction
        for (int k = n_panels - 1; k >= 0; --k) {
            const double lo = double(k) / n_panels, hi = double(k + 1) / n_panels;
            const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            for (int i = 6; i >= 0; --i) acc += kGw[i] * eval(mid + kGx[i] * half, ref) * half;
        }
        return acc;
    };
    const cplx coarse = composite(6);
    const cplx fine = composite(12);
    *err += std::abs(fine - coarse);
    return fine;
}

void check_pole_clearance(const QDParams&, const PathPolyline& poly, double clearance) {
    for (std::size_t i = 0; i + 1 < poly.pts.size(); ++i)
        for (cplx pole : {cplx(-1.0, 0.0), cplx(1.0, 0.0)})
            if (point_segment_distance(pole, poly.pts[i], poly.pts[i + 1]) < clearance)
                throw std::invalid_argument("period quadrature: arc passes within r_safe of a pole");
}

}  // namespace

cplx chain_integral_fixed(const QDParams& p, const PathPolyline& poly, cplx s_front,
                          int panels_per_segment) {
    if (poly.pts.size() < 2) return 0.0;
    if (panels_per_segment < 1) panels_per_segment = 1;
    Chain ch{&p, poly.pts.front(), s_front};
    cplx total = 0.0;
    for (std::size_t i = 0; i + 1 < poly.pts.size(); ++i) {
        const cplx z0 = poly.pts[i], z1 = poly.pts[i + 1];
        if (std::abs(z1 - z0) == 0.0) continue;
        for (int k = 0; k < panels_per_segment; ++k) {
            const cplx zk = z0 + (z1 - z0) * (double(k + 1) / panels_per_segment);
            total += panel(ch, zk);
        }
    }
    return total;
}

std::array<cplx, 4> class_values(const QDParams& p) {
    const cplx sx = std::sqrt((1.0 - p.a) * (1.0 - p.b));
    const cplx sy = std::sqrt((1.0 + p.a) * (1.0 + p.b));
    const cplx pref = kI * std::numbers::pi * p.lambda / 2.0;
    return {pref * (sx + sy - 2.0), pref * (sx - sy - 2.0), pref * (-sx + sy - 2.0),
            pref * (-sx - sy - 2.0)};
}

double im_defect(const QDParams& p, const PathPolyline& poly) {
    if (poly.pts.size() < 2) return 0.0;
    const double zero_snap = 1e-9 * (1.0 + p.scale());
    std::size_t first = 0, last = poly.pts.size() - 1;
    const bool sing_front =
        std::abs(poly.pts.front() - p.a) < zero_snap || std::abs(poly.pts.front() - p.b) < zero_snap;
    const bool sing_back =
        std::abs(poly.pts.back() - p.a) < zero_snap || std::abs(poly.pts.back() - p.b) < zero_snap;
    if (sing_front) ++first;
    if (sing_back) --last;
    if (first >= last) return 0.0;

    Chain ch{&p, poly.pts[first], std::sqrt(p.phi(poly.pts[first]))};
    cplx total = 0.0;
    double err = 0.0;
    if (sing_front) {
        const cplx zero = std::abs(poly.pts.front() - p.a) < zero_snap ? p.a : p.b;
        const cplx other = (std::abs(zero - p.a) < std::abs(zero - p.b)) ? p.b : p.a;
        total += singular_segment(p, ch, zero, other, &err);
    }
    for (std::size_t i = first; i < last; ++i) {
        if (std::abs(poly.pts[i + 1] - ch.z) == 0.0) continue;
        total += panel(ch, poly.pts[i + 1]);
    }
    if (sing_back) {
        const cplx zero = std::abs(poly.pts.back() - p.a) < zero_snap ? p.a : p.b;
        const cplx other = (std::abs(zero - p.a) < std::abs(zero - p.b)) ? p.b : p.a;
        total -= singular_segment(p, ch, zero, other, &err);
    }
    return std::abs(total.imag());
}

namespace {

// Chain integral over a polyline whose branch selection is anchored near the
// front point. Singular flags mark endpoints that sit exactly on a zero.
cplx chain_arc_integral(const QDParams& p, const PathPolyline& work, bool sing_front, bool sing_back,
                        PeriodReport& rep) {
    const std::size_t first = sing_front ? 1 : 0;
    const std::size_t last = sing_back ? work.pts.size() - 2 : work.pts.size() - 1;
    if (first >= work.pts.size() || last >= work.pts.size() || first > last)
        throw std::invalid_argument("arc_period: arc too short for endpoint handling");

    Chain ch{&p, work.pts[first], 0.0};
    try {
        cplx dir;
        BranchState st = anchor_from_infinity(p, work.pts[first], work, &dir);
        ch.s = st.s;
        rep.sign_resolved = true;
        if (work.pts.size() > first + 1) {
            const cplx tau = work.pts[first + 1] - work.pts[first];
            const double crossed = tau.real() * (-dir).imag() - tau.imag() * (-dir).real();
            if (std::abs(crossed) > 1e-9 * std::abs(tau)) rep.plus_side = crossed > 0.0 ? +1 : -1;
        }
    } catch (const std::runtime_error&) {
        ch.s = std::sqrt(p.phi(work.pts[first]));
    }

    cplx total = 0.0;
    double err = 0.0;
    if (sing_front) {
        const cplx zero = work.pts.front();
        const cplx other = (std::abs(zero - p.a) < std::abs(zero - p.b)) ? p.b : p.a;
        total += singular_segment(p, ch, zero, other, &err);
    }
    const double total_len = std::max(work.length(), 1e-30);
    for (std::size_t i = first; i < last; ++i) {
        const cplx z1 = work.pts[i + 1];
        if (std::abs(z1 - ch.z) == 0.0) continue;
        const double eps = 1e-11 * (std::abs(z1 - ch.z) / total_len + 1e-3);
        total += adaptive_segment(ch, z1, eps, &err);
    }
    if (sing_back) {
        const cplx zero = work.pts.back();
        const cplx other = (std::abs(zero - p.a) < std::abs(zero - p.b)) ? p.b : p.a;
        total -= singular_segment(p, ch, zero, other, &err);
    }
    rep.est_error = err;
    return total;
}

bool lex_less(cplx u, cplx v) {
    if (u.real() != v.real()) return u.real() < v.real();
    return u.imag() < v.imag();
}

}  // namespace

PeriodReport arc_period(const QDParams& p, const PathPolyline& arc, bool endpoint_singular,
                        const Tolerances&) {
    if (arc.pts.size() < 2) throw std::invalid_argument("arc_period: arc needs at least 2 points");
    const double r_safe = 1e-3 * p.scale();
    check_pole_clearance(p, arc, 0.5 * r_safe);

    PathPolyline work = arc;
    const double snap = 1e-6 * p.scale();
    if (endpoint_singular) {
        const bool fwd = std::abs(arc.pts.front() - p.a) <= snap && std::abs(arc.pts.back() - p.b) <= snap;
        const bool rev = std::abs(arc.pts.front() - p.b) <= snap && std::abs(arc.pts.back() - p.a) <= snap;
        if (!fwd && !rev)
            throw std::invalid_argument("arc_period: endpoint_singular requires an arc joining a and b");
        work.pts.front() = fwd ? p.a : p.b;
        work.pts.back() = fwd ? p.b : p.a;
    }

    // anchor at the lexicographically smaller endpoint so that reversing the
    // arc negates the value
    PeriodReport rep;
    if (lex_less(work.pts.front(), work.pts.back())) {
        rep.value = chain_arc_integral(p, work, endpoint_singular, endpoint_singular, rep);
    } else {
        rep.value = -chain_arc_integral(p, work.reversed(), endpoint_singular, endpoint_singular, rep);
        rep.plus_side = -rep.plus_side;
    }
    return rep;
}

PeriodReport loop_period(const QDParams& p, const PathPolyline& loop, const Tolerances&) {
    if (!loop.closed(1e-9 * (1.0 + p.scale())))
        throw std::invalid_argument("loop_period: polyline is not closed");
    const double r_safe = 1e-3 * p.scale();
    check_pole_clearance(p, loop, 0.5 * r_safe);
    for (std::size_t i = 0; i + 1 < loop.pts.size(); ++i)
        for (cplx zero : {p.a, p.b})
            if (point_segment_distance(zero, loop.pts[i], loop.pts[i + 1]) < 0.5 * r_safe)
                throw std::invalid_argument("loop_period: loop passes within r_safe of a zero");

    PeriodReport rep;
    rep.winding_minus1 = winding_number(loop, cplx(-1.0, 0.0));
    rep.winding_plus1 = winding_number(loop, cplx(1.0, 0.0));
    rep.winding_a = winding_number(loop, p.a);
    rep.winding_b = winding_number(loop, p.b);

    Chain ch{&p, loop.pts[0], std::sqrt(p.phi(loop.pts[0]))};
    cplx total = 0.0;
    double err = 0.0;
    const double total_len = std::max(loop.length(), 1e-30);
    for (std::size_t i = 0; i + 1 < loop.pts.size(); ++i) {
        const cplx z1 = loop.pts[i + 1];
        if (std::abs(z1 - ch.z) == 0.0) continue;
        const double eps = 1e-11 * (std::abs(z1 - ch.z) / total_len + 1e-3);
        total += adaptive_segment(ch, z1, eps, &err);
    }
    // a loop with odd monodromy does not return to its starting branch
    if (std::abs(ch.s - std::sqrt(p.phi(loop.pts[0]))) >
        std::abs(ch.s + std::sqrt(p.phi(loop.pts[0]))) * 1e-3) {
        if ((std::abs(rep.winding_a) + std::abs(rep.winding_b)) % 2 == 0)
            throw std::runtime_error("loop_period: branch failed to close on an even-monodromy loop");
    }
    rep.value = total;
    rep.est_error = err;
    return rep;
}

PathPolyline reference_arc(const QDParams& p) {
    const double margin = std::min(0.12 * p.scale(), 0.4);
    struct Bulge {
        double t_proj;
        cplx pole;
    };
    std::vector<Bulge> bulges;
    const cplx d = p.b - p.a;
    for (cplx pole : {cplx(-1.0, 0.0), cplx(1.0, 0.0)}) {
        // a detour is needed only when the pole faces the segment's interior;
        // proximity at an endpoint just means the zero sits near the pole
        const double t =
            ((pole - p.a).real() * d.real() + (pole - p.a).imag() * d.imag()) / std::norm(d);
        if (t <= 0.02 || t >= 0.98) continue;
        if (std::abs(pole - (p.a + t * d)) < margin) bulges.push_back({t, pole});
    }
    if (bulges.empty()) {
        return PathPolyline::from_points({p.a, 0.5 * (p.a + p.b), p.b});
    }
    std::sort(bulges.begin(), bulges.end(), [](auto& u, auto& v) { return u.t_proj < v.t_proj; });

    std::vector<cplx> pts{p.a};
    for (const auto& bl : bulges) {
        double radius = std::max(2.0 * margin, 0.25);
        radius = std::min({radius, 0.6 * std::abs(p.a - bl.pole), 0.6 * std::abs(p.b - bl.pole), 0.9});
        const double dist = point_segment_distance(bl.pole, p.a, p.b);
        if (radius <= dist)
            throw std::runtime_error("reference_arc: cannot detour, zeros too close to a pole");
        const cplx proj = p.a + bl.t_proj * d;
        const double w = std::sqrt(radius * radius - dist * dist);
        const cplx dir = d / std::abs(d);
        const cplx entry = proj - w * dir;
        const cplx exit = proj + w * dir;
        const double th0 = std::arg(entry - bl.pole);
        double span = std::arg((exit - bl.pole) / (entry - bl.pole));  // in (-pi, pi]
        // walk the side of +i*dir (left of the segment)
        const cplx left = kI * dir;
        const cplx mid_ccw = std::polar(1.0, th0 + 0.5 * (span < 0 ? span + 2.0 * std::numbers::pi : span));
        if (mid_ccw.real() * left.real() + mid_ccw.imag() * left.imag() > 0.0) {
            if (span < 0) span += 2.0 * std::numbers::pi;
        } else {
            if (span > 0) span -= 2.0 * std::numbers::pi;
        }
        pts.push_back(entry);
        const int n_arc = 16;
        for (int k = 1; k < n_arc; ++k)
            pts.push_back(bl.pole + radius * std::polar(1.0, th0 + span * k / n_arc));
        pts.push_back(exit);
    }
    pts.push_back(p.b);
    return PathPolyline::from_points(std::move(pts));
}

namespace {

// Branch sign of sqrt(phi) at a pole relative to lambda * principal product,
// for the branch cut along `arc`. +1 when they agree.
int pole_branch_sign(const QDParams& p, const PathPolyline& arc, cplx pole, cplx lam_s) {
    BranchState st = anchor_from_infinity(p, pole, arc, nullptr);
    const cplx ratio = st.s / lam_s;
    if (std::abs(std::abs(ratio) - 1.0) > 1e-3 || std::abs(ratio.real()) < 0.5)
        throw std::runtime_error("classify_arc: pole branch probe inconclusive");
    return ratio.real() > 0.0 ? +1 : -1;
}

}  // namespace

PeriodReport classify_arc(const QDParams& p, const PathPolyline& arc, const Tolerances& tol) {
    if (arc.pts.size() < 2) throw std::invalid_argument("classify_arc: empty arc");
    const double snap = 1e-6 * p.scale();
    PathPolyline work = arc;
    if (std::abs(arc.pts.front() - p.b) <= snap && std::abs(arc.pts.back() - p.a) <= snap)
        work = arc.reversed();
    if (std::abs(work.pts.front() - p.a) > snap || std::abs(work.pts.back() - p.b) > snap)
        throw std::invalid_argument("classify_arc: arc must join a and b");

    PeriodReport rep = arc_period(p, work, true, tol);

    const auto values = class_values(p);
    const PropertyPReport pp = property_p(p, tol);

    int best = -1, best_sign = 0;
    double best_diff = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 4; ++k) {
        for (int sg : {+1, -1}) {
            const double diff = std::abs(rep.value - double(sg) * values[k]);
            if (diff < best_diff) {
                best_diff = diff;
                best = k;
                best_sign = sg;
            }
        }
    }

    // the pole-branch probes give the class directly and break value ties
    bool probed = false;
    try {
        const cplx sx = std::sqrt((1.0 - p.a) * (1.0 - p.b));
        const cplx sy = std::sqrt((1.0 + p.a) * (1.0 + p.b));
        const int e1 = pole_branch_sign(p, work, cplx(1.0, 0.0), p.lambda * sx);
        const int e2 = pole_branch_sign(p, work, cplx(-1.0, 0.0), p.lambda * sy);
        const int s1 = e1, s2 = -e2;
        const int k = (s1 > 0) ? (s2 > 0 ? 0 : 1) : (s2 > 0 ? 2 : 3);
        const double diff_plus = std::abs(rep.value - values[k]);
        const double diff_minus = std::abs(rep.value + values[k]);
        best = k;
        best_sign = diff_plus <= diff_minus ? +1 : -1;
        best_diff = std::min(diff_plus, diff_minus);
        probed = true;
    } catch (const std::runtime_error&) {
        // fall back to the closest-value match
    }
    (void)probed;

    rep.class_value = values[best];
    rep.matched_sign = best_sign;
    rep.matched_class = pp.class_labels[best];
    rep.matched = best_diff <= std::max(tol.tol_period * (1.0 + std::abs(values[best])), 3.0 * rep.est_error);

    // winding of arc + reversed reference around the poles
    PathPolyline ref = reference_arc(p);
    std::vector<cplx> loop_pts = work.pts;
    const PathPolyline ref_rev = ref.reversed();
    loop_pts.insert(loop_pts.end(), ref_rev.pts.begin(), ref_rev.pts.end());
    PathPolyline loop = PathPolyline::from_points(std::move(loop_pts));
    rep.winding_minus1 = winding_number(loop, cplx(-1.0, 0.0));
    rep.winding_plus1 = winding_number(loop, cplx(1.0, 0.0));
    return rep;
}

TeichResult teich_check(const QDPolygon& poly) {
    double lhs = 0.0;
    for (const auto& c : poly.corners) {
        if (c.n != 1 && c.n != 0 && c.n != -2)
            throw std::invalid_argument("teich_check: corner multiplicity must be -2, 0 or 1");
        if (c.theta < -1e-12 || c.theta > 2.0 * std::numbers::pi + 1e-12)
            throw std::invalid_argument("teich_check: corner angle outside [0, 2*pi]");
        lhs += 1.0 - c.theta * (c.n + 2) / (2.0 * std::numbers::pi);
    }
    double rhs = 2.0;
    for (int n : poly.interior) {
        if (n != 1 && n != 0 && n != -2)
            throw std::invalid_argument("teich_check: interior multiplicity must be -2, 0 or 1");
        rhs += n;
    }
    return TeichResult{lhs, rhs, std::abs(lhs - rhs) < 1e-12};
}

}  // namespace qdt
