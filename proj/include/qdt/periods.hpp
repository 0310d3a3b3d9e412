#pragma once

#include <optional>
#include <string>

#include "qdt/branch.hpp"
#include "qdt/geometry.hpp"
#include "qdt/qdiff.hpp"

namespace qdt {

/// A contour integral of sqrt(phi)/(t^2-1) with error estimate and, when
/// matched, the closed-form class it equals up to sign.
struct PeriodReport {
    cplx value;
    double est_error = 0.0;
    bool sign_resolved = false;  // true when the selection was anchored from infinity
    int plus_side = 0;           // +1 when the anchored selection is the arc's +side value

    bool matched = false;
    std::string matched_class;  // "1", "A+1", "B+1", "A+B+1" or a sign-pair tag
    int matched_sign = 0;       // value ~ matched_sign * class_value
    cplx class_value;           // the closed-form value it was matched to

    int winding_minus1 = 0, winding_plus1 = 0;  // comparison loop vs reference arc
    int winding_a = 0, winding_b = 0;           // set by loop_period
};

/// Integral of the +side square root over an arc. With endpoint_singular the
/// arc must join a and b exactly; the inverse-square-root endpoint behavior
/// is absorbed by a quadratic substitution there.
PeriodReport arc_period(const QDParams& p, const PathPolyline& arc, bool endpoint_singular,
                        const Tolerances& tol = {});

/// Integral over a closed polyline avoiding all four critical points, with
/// winding numbers around -1, 1, a, b.
PeriodReport loop_period(const QDParams& p, const PathPolyline& loop, const Tolerances& tol = {});

/// Period of an a-to-b arc matched against the four closed-form class values
/// (up to sign), with winding numbers relative to the stored reference arc.
PeriodReport classify_arc(const QDParams& p, const PathPolyline& arc, const Tolerances& tol = {});

/// The stored reference arc joining a and b: the straight segment, detoured
/// around a pole when the segment passes too close to one.
PathPolyline reference_arc(const QDParams& p);

/// The four closed-form class values of property_p in sign-pair order.
std::array<cplx, 4> class_values(const QDParams& p);

/// |Im| of the accumulated integral of sqrt(phi)/(t^2-1) along a polyline,
/// the defining invariant of a horizontal trajectory.
double im_defect(const QDParams& p, const PathPolyline& poly);

/// Composite chain integral of sqrt(phi)/(t^2-1) with a fixed number of
/// Gauss panels per segment and a caller-provided starting branch value.
cplx chain_integral_fixed(const QDParams& p, const PathPolyline& poly, cplx s_front,
                          int panels_per_segment);

/// A domain bounded by trajectories and orthogonal trajectories: corner
/// multiplicities/angles plus multiplicities of interior critical points.
struct QDPolygon {
    struct Corner {
        int n;         // multiplicity: 1 zero, 0 regular, -2 double pole
        double theta;  // interior angle in [0, 2pi]
    };
    std::vector<Corner> corners;
    std::vector<int> interior;
};

struct TeichResult {
    double lhs, rhs;
    bool consistent;
};

/// Evaluates sum_j beta_j against 2 + sum_i n_i with
/// beta_j = 1 - theta_j (n_j+2)/(2 pi).
TeichResult teich_check(const QDPolygon& poly);

}  // namespace qdt
