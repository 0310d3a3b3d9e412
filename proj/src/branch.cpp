#include "qdt/branch.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qdt/io.hpp"

namespace qdt {

cplx nearest_sqrt(cplx w, cplx ref) {
    const cplx r = std::sqrt(w);
    const double dot = r.real() * ref.real() + r.imag() * ref.imag();
    return dot >= 0.0 ? r : -r;
}

double default_r_safe(const QDParams& p) { return 1e-3 * p.scale(); }

BranchState root_at_infinity(const QDParams& p, cplx z) {
    const double r_far = 3.0 * (std::max({std::abs(p.a), std::abs(p.b), 1.0}) + std::abs(p.a - p.b) + 1.0);
    if (std::abs(z) < r_far)
        throw std::invalid_argument("root_at_infinity: |z| too small for a stable ratio test (need |z| >= " +
                                    format_double(r_far) + ")");
    const cplx s = std::sqrt(p.phi(z));
    const cplx ratio = s / (p.lambda * z);
    if (std::abs(ratio.real()) < 0.5)
        throw std::runtime_error("root_at_infinity: ratio test inconclusive at z = " + format_complex(z));
    return BranchState{z, ratio.real() > 0.0 ? s : -s};
}

namespace {

void check_clearance(const QDParams& p, cplx z, double clearance) {
    if (clearance <= 0.0) return;
    const cplx crit[4] = {p.a, p.b, cplx(-1.0, 0.0), cplx(1.0, 0.0)};
    const char* names[4] = {"a", "b", "-1", "1"};
    for (int i = 0; i < 4; ++i)
        if (std::abs(z - crit[i]) < clearance)
            throw std::runtime_error(std::string("branch continuation: path passes within r_safe of ") +
                                     names[i] + " near z = " + format_complex(z));
}

BranchState step_to(const QDParams& p, BranchState cur, cplx z1, double clearance, int depth) {
    check_clearance(p, z1, clearance);
    const cplx phi0 = cur.s * cur.s;
    const cplx phi1 = p.phi(z1);
    // the phase test below is only meaningful when the step is short against
    // the distance to the branch points, otherwise arg can wrap unobserved
    const double step_len = std::abs(z1 - cur.z);
    const double zero_dist = std::min({std::abs(cur.z - p.a), std::abs(cur.z - p.b),
                                       std::abs(z1 - p.a), std::abs(z1 - p.b)});
    const cplx ratio = phi1 / phi0;
    if (step_len > 0.5 * zero_dist || std::abs(std::arg(ratio)) > std::numbers::pi / 2.0 ||
        std::abs(ratio) > 16.0 || std::abs(ratio) < 1.0 / 16.0) {
        if (depth > 80)
            throw std::runtime_error("branch continuation: step subdivision failed near z = " +
                                     format_complex(z1));
        const cplx mid = 0.5 * (cur.z + z1);
        BranchState half = step_to(p, cur, mid, clearance, depth + 1);
        return step_to(p, half, z1, clearance, depth + 1);
    }
    return BranchState{z1, nearest_sqrt(phi1, cur.s)};
}

}  // namespace

BranchState continue_straight(const QDParams& p, BranchState start, cplx z1, double min_clearance) {
    return step_to(p, start, z1, min_clearance, 0);
}

BranchState continue_along(const QDParams& p, BranchState start, const PathPolyline& path,
                           double min_clearance) {
    if (path.pts.empty()) return start;
    if (std::abs(path.pts.front() - start.z) > 1e-9 * (1.0 + std::abs(start.z)))
        throw std::invalid_argument("continue_along: path does not start at the branch state");
    double clearance = min_clearance < 0.0 ? default_r_safe(p) : min_clearance;
    BranchState cur = start;
    for (std::size_t i = 1; i < path.pts.size(); ++i) cur = step_to(p, cur, path.pts[i], clearance, 0);
    return cur;
}

BranchState anchor_from_infinity(const QDParams& p, cplx target, const PathPolyline& avoid,
                                 cplx* approach_dir) {
    const cplx m = 0.5 * (p.a + p.b);
    const double r_far = 4.0 * (std::max({std::abs(p.a), std::abs(p.b), 1.0}) + std::abs(p.a - p.b) + 1.0);
    const double skip = 2e-2 * p.scale();
    auto clear_of_zeros = [&](cplx q0, cplx q1) {
        const double d = 1e-7 * p.scale();
        for (cplx zero : {p.a, p.b}) {
            if (std::abs(zero - target) < 10.0 * d) continue;  // probe may end next to a zero
            if (point_segment_distance(zero, q0, q1) < d) return false;
        }
        return true;
    };
    // straight probes first, then two-leg probes through the gap between the zeros
    for (int k = 0; k < 16; ++k) {
        const double ang = 2.0 * std::numbers::pi * (k + 0.25) / 16.0;
        const cplx z_far = m + r_far * std::polar(1.0, ang);
        if (segment_hits_polyline(z_far, target, avoid, skip)) continue;
        if (!clear_of_zeros(z_far, target)) continue;
        BranchState st = root_at_infinity(p, z_far);
        if (approach_dir) {
            const cplx d = target - z_far;
            *approach_dir = d / std::abs(d);
        }
        return continue_straight(p, st, target, -1.0);
    }
    for (int j = 0; j < 8; ++j) {
        const cplx way = m + 0.35 * std::abs(p.a - p.b) * std::polar(1.0, 2.0 * std::numbers::pi * (j + 0.5) / 8.0);
        for (int k = 0; k < 8; ++k) {
            const cplx z_far = m + r_far * std::polar(1.0, 2.0 * std::numbers::pi * (k + 0.37) / 8.0);
            if (segment_hits_polyline(z_far, way, avoid, 0.0)) continue;
            if (segment_hits_polyline(way, target, avoid, skip)) continue;
            if (!clear_of_zeros(z_far, way) || !clear_of_zeros(way, target)) continue;
            BranchState st = root_at_infinity(p, z_far);
            st = continue_straight(p, st, way, -1.0);
            if (approach_dir) {
                const cplx d = target - way;
                *approach_dir = d / std::abs(d);
            }
            return continue_straight(p, st, target, -1.0);
        }
    }
    throw std::runtime_error("branch anchor: no probe path from infinity avoids the arc");
}

SideValues side_values(const QDParams& p, const PathPolyline& arc, double offset) {
    if (arc.pts.size() < 2) throw std::invalid_argument("side_values: arc needs at least 2 points");
    const double unit = 1.0 + p.scale();
    if (std::abs(arc.pts.front() - p.a) > 1e-9 * unit || std::abs(arc.pts.back() - p.b) > 1e-9 * unit)
        throw std::invalid_argument("side_values: arc must join a and b");
    if (offset <= 0.0) offset = 1e-4 * p.scale();

    const std::size_t n = arc.pts.size();
    std::vector<cplx> normal(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx t;
        if (i == 0)
            t = arc.pts[1] - arc.pts[0];
        else if (i + 1 == n)
            t = arc.pts[n - 1] - arc.pts[n - 2];
        else
            t = arc.pts[i + 1] - arc.pts[i - 1];
        const double len = std::abs(t);
        if (len == 0.0) throw std::invalid_argument("side_values: repeated polyline point");
        normal[i] = cplx(0.0, 1.0) * t / len;
    }
    auto offset_curve = [&](double sign) {
        std::vector<cplx> pts(n);
        for (std::size_t i = 0; i < n; ++i) pts[i] = arc.pts[i] + sign * offset * normal[i];
        return PathPolyline::from_points(std::move(pts));
    };
    const PathPolyline plus_curve = offset_curve(+1.0);
    const PathPolyline minus_curve = offset_curve(-1.0);

    // parallels must clear the poles
    for (const auto& curve : {plus_curve, minus_curve})
        for (cplx z : curve.pts)
            for (cplx pole : {cplx(-1.0, 0.0), cplx(1.0, 0.0)})
                if (std::abs(z - pole) < 0.5 * default_r_safe(p))
                    throw std::runtime_error("side_values: offset parallel passes a pole; reduce the offset");

    SideValues out;
    BranchState cur = anchor_from_infinity(p, plus_curve.pts.front(), arc, nullptr);
    out.plus.push_back(cur);
    for (std::size_t i = 1; i < n; ++i) {
        cur = step_to(p, cur, plus_curve.pts[i], -1.0, 0);
        out.plus.push_back(cur);
    }
    // swing around the branch point a, behind the arc, to seed the other side
    const cplx tau0 = (arc.pts[1] - arc.pts[0]) / std::abs(arc.pts[1] - arc.pts[0]);
    BranchState swing = out.plus.front();
    const int n_arc = 8;
    for (int k = 1; k <= n_arc; ++k) {
        const double ang = std::numbers::pi / 2.0 + std::numbers::pi * k / n_arc;  // +i*tau0 around to -i*tau0
        swing = step_to(p, swing, p.a + offset * tau0 * std::polar(1.0, ang), -1.0, 0);
    }
    cur = step_to(p, swing, minus_curve.pts.front(), -1.0, 0);
    out.minus.push_back(cur);
    for (std::size_t i = 1; i < n; ++i) {
        cur = step_to(p, cur, minus_curve.pts[i], -1.0, 0);
        out.minus.push_back(cur);
    }
    return out;
}

}  // namespace qdt
