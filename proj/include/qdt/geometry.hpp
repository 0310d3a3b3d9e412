#pragma once

#include <complex>
#include <vector>

namespace qdt {

using cplx = std::complex<double>;

/// An oriented discretized arc in the complex plane: ordered points with
/// cumulative arclength.
struct PathPolyline {
    std::vector<cplx> pts;
    std::vector<double> cum;  // cum[i] = arclength from pts[0] to pts[i]

    static PathPolyline from_points(std::vector<cplx> points);

    void rebuild_cumlen();
    double length() const { return cum.empty() ? 0.0 : cum.back(); }
    std::size_t size() const { return pts.size(); }
    bool closed(double tol) const;

    PathPolyline reversed() const;
};

double point_segment_distance(cplx p, cplx s0, cplx s1);

/// Minimum distance from p to any segment of the polyline.
double distance_to_polyline(cplx p, const PathPolyline& poly);

/// Symmetric Hausdorff distance between two polylines, sampling vertices
/// against segments. `stride` subsamples the vertex sets for speed.
double hausdorff_distance(const PathPolyline& u, const PathPolyline& v, std::size_t stride = 1);

/// Winding number of a closed polyline around p, by accumulated argument.
/// Throws if the polyline passes through p.
int winding_number(const PathPolyline& loop, cplx p);

/// Accumulated argument (in turns, not necessarily integer) of poly around p.
double turning_fraction(const PathPolyline& poly, cplx p);

bool segments_intersect(cplx a0, cplx a1, cplx b0, cplx b1);

/// True if the open segment (q0,q1) crosses any segment of poly; segments
/// whose endpoints lie within `skip_radius` of q1 are ignored so that a probe
/// may land on the polyline itself.
bool segment_hits_polyline(cplx q0, cplx q1, const PathPolyline& poly, double skip_radius);

/// Circle as a closed polyline (last point = first point), counterclockwise
/// for radius > 0 traversed with positive orientation.
PathPolyline circle_polyline(cplx center, double radius, int n_points, bool clockwise = false);

}  // namespace qdt
