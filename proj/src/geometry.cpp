#include "qdt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qdt {

PathPolyline PathPolyline::from_points(std::vector<cplx> points) {
    PathPolyline p;
    p.pts = std::move(points);
    p.rebuild_cumlen();
    return p;
}

void PathPolyline::rebuild_cumlen() {
    cum.resize(pts.size());
    double s = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) s += std::abs(pts[i] - pts[i - 1]);
        cum[i] = s;
    }
}

bool PathPolyline::closed(double tol) const {
    return pts.size() > 2 && std::abs(pts.front() - pts.back()) <= tol;
}

PathPolyline PathPolyline::reversed() const {
    PathPolyline r;
    r.pts.assign(pts.rbegin(), pts.rend());
    r.rebuild_cumlen();
    return r;
}

double point_segment_distance(cplx p, cplx s0, cplx s1) {
    const cplx d = s1 - s0;
    const double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(p - s0);
    double t = ((p.real() - s0.real()) * d.real() + (p.imag() - s0.imag()) * d.imag()) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (s0 + t * d));
}

double distance_to_polyline(cplx p, const PathPolyline& poly) {
    if (poly.pts.empty()) throw std::invalid_argument("distance_to_polyline: empty polyline");
    if (poly.pts.size() == 1) return std::abs(p - poly.pts[0]);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < poly.pts.size(); ++i)
        best = std::min(best, point_segment_distance(p, poly.pts[i], poly.pts[i + 1]));
    return best;
}

double hausdorff_distance(const PathPolyline& u, const PathPolyline& v, std::size_t stride) {
    if (stride == 0) stride = 1;
    auto directed = [stride](const PathPolyline& from, const PathPolyline& to) {
        double worst = 0.0;
        for (std::size_t i = 0; i < from.pts.size(); i += stride)
            worst = std::max(worst, distance_to_polyline(from.pts[i], to));
        worst = std::max(worst, distance_to_polyline(from.pts.back(), to));
        return worst;
    };
    return std::max(directed(u, v), directed(v, u));
}

double turning_fraction(const PathPolyline& poly, cplx p) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < poly.pts.size(); ++i) {
        cplx u = poly.pts[i] - p;
        cplx v = poly.pts[i + 1] - p;
        double ru = std::abs(u), rv = std::abs(v);
        if (ru == 0.0 || rv == 0.0) throw std::invalid_argument("winding: polyline passes through the point");
        // subdivide until each increment is well under pi
        double dphi = std::arg(v / u);
        if (std::abs(dphi) > 2.0) {
            cplx mid = 0.5 * (poly.pts[i] + poly.pts[i + 1]);
            PathPolyline half;
            half.pts = {poly.pts[i], mid, poly.pts[i + 1]};
            half.rebuild_cumlen();
            total += turning_fraction(half, p) * 2.0 * std::numbers::pi;
            continue;
        }
        total += dphi;
    }
    return total / (2.0 * std::numbers::pi);
}

int winding_number(const PathPolyline& loop, cplx p) {
    const double turns = turning_fraction(loop, p);
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) > 0.05)
        throw std::runtime_error("winding_number: accumulated argument is not an integer turn count");
    return static_cast<int>(rounded);
}

namespace {
double cross(cplx o, cplx u, cplx v) {
    return (u.real() - o.real()) * (v.imag() - o.imag()) - (u.imag() - o.imag()) * (v.real() - o.real());
}
}  // namespace

bool segments_intersect(cplx a0, cplx a1, cplx b0, cplx b1) {
    const double d1 = cross(b0, b1, a0);
    const double d2 = cross(b0, b1, a1);
    const double d3 = cross(a0, a1, b0);
    const double d4 = cross(a0, a1, b1);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    return false;
}

bool segment_hits_polyline(cplx q0, cplx q1, const PathPolyline& poly, double skip_radius) {
    for (std::size_t i = 0; i + 1 < poly.pts.size(); ++i) {
        if (std::abs(poly.pts[i] - q1) <= skip_radius && std::abs(poly.pts[i + 1] - q1) <= skip_radius)
            continue;
        if (segments_intersect(q0, q1, poly.pts[i], poly.pts[i + 1])) return true;
    }
    return false;
}

PathPolyline circle_polyline(cplx center, double radius, int n_points, bool clockwise) {
    if (n_points < 8) n_points = 8;
    std::vector<cplx> pts;
    pts.reserve(n_points + 1);
    for (int k = 0; k <= n_points; ++k) {
        double t = 2.0 * std::numbers::pi * k / n_points;
        if (clockwise) t = -t;
        pts.push_back(center + radius * cplx(std::cos(t), std::sin(t)));
    }
    pts.back() = pts.front();
    return PathPolyline::from_points(std::move(pts));
}

}  // namespace qdt
