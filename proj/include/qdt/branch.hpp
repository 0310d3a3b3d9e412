#pragma once

#include "qdt/geometry.hpp"
#include "qdt/qdiff.hpp"

namespace qdt {

/// A point together with the value of the continued square root of
/// phi(z) = lambda^2 (z-a)(z-b) there.
struct BranchState {
    cplx z, s;
};

/// Of the two square roots of w, the one nearer to ref.
cplx nearest_sqrt(cplx w, cplx ref);

/// Default clearance radius around a, b, -1, 1 for continuation paths.
double default_r_safe(const QDParams& p);

/// The root of phi(z) asymptotic to lambda*z, valid far outside the
/// configuration. Throws if z is too close in for the ratio test.
BranchState root_at_infinity(const QDParams& p, cplx z);

/// Continue a branch state along a straight segment to z1, subdividing until
/// each step changes arg(phi) by less than pi/2. min_clearance < 0 disables
/// the proximity check (used when a path deliberately ends near a zero).
BranchState continue_straight(const QDParams& p, BranchState start, cplx z1, double min_clearance = -1.0);

/// Continue along a polyline. The path must start at start.z and keep
/// min_clearance (default: r_safe) away from a, b, -1, 1.
BranchState continue_along(const QDParams& p, BranchState start, const PathPolyline& path,
                           double min_clearance = -1.0);

/// Branch state at `target` continued from the normalized value far away,
/// along a straight or two-leg probe that avoids the polyline `avoid`.
/// Optionally reports the probe's final approach direction. Throws when no
/// probe path is found.
BranchState anchor_from_infinity(const QDParams& p, cplx target, const PathPolyline& avoid,
                                 cplx* approach_dir = nullptr);

struct SideValues {
    std::vector<BranchState> plus;   // left of the arc's orientation
    std::vector<BranchState> minus;  // right side
};

/// Boundary values of the square root on both sides of an arc joining a and
/// b, computed by continuation along parallels at the given offset. The two
/// parallels share one anchor continued from far away, so plus[k].s ~
/// -minus[k].s as offset -> 0.
SideValues side_values(const QDParams& p, const PathPolyline& arc, double offset);

}  // namespace qdt
