#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qdt/periods.hpp"
#include "qdt/qdiff.hpp"

namespace qdt {

/// The three emanating directions at a simple zero, spaced 2*pi/3.
struct LaunchSpec {
    cplx zero;
    std::array<double, 3> angles;
};

/// Step-control and detection parameters for trace(). Radii and lengths with
/// a _scales suffix are multiples of QDParams::scale().
struct StepLimits {
    std::size_t max_steps = 1'000'000;
    double max_arclength_scales = 1e3;
    double rtol = 1e-11;
    double atol_scales = 1e-11;
    double h_max_scales = 0.05;
    double r_pole_scales = 1e-3;        // termination disk at -1 / +1
    double delta_short_scales = 1e-2;   // other-zero candidate disk
    double r_zero_scales = 1e-3;        // same-zero return disk
    double delta_loop_scales = 1e-4;    // closed-loop rejoin distance
    double loop_min_sep = -1.0;         // absolute; < 0 means 0.1*scale
    double eps_launch_scales = 1e-6;    // offset of launch points from a zero

    // Closest-approach mode: instead of stopping on the delta_short disk,
    // run to the minimum distance from the other zero (used by refinement).
    bool track_min_approach = false;
};

enum class Fate { ToPoleMinus1, ToPolePlus1, ToInfinity, ToOtherZero, ClosedLoop, Truncated };

const char* fate_name(Fate f);

struct TrajectoryRecord {
    int zero_id = -1;      // 0 = launched from a, 1 = from b, -1 = regular start
    int angle_index = -1;  // prong index at the originating zero
    PathPolyline polyline;
    Fate fate = Fate::Truncated;
    double terminal_gap = 0.0;  // distance to the claimed terminal object
    double arclength = 0.0;
    double est_error = 0.0;  // accumulated local step error estimates
    double im_defect = -1.0; // filled by build_graph
    std::string note;
};

enum class Topology {
    OneShortTwoInfinite,
    TwoShortJordanCurve,
    RealLoopsPlusSegment,
    RealLoopsCommonEdge,
    NoShort,
    Other,
};

const char* topology_name(Topology t);

struct ShortTrajectory {
    PathPolyline path;    // endpoints snapped to a and b
    double endpoint_gap;  // closest-approach distance before snapping
    PeriodReport period;
};

struct PoleLoop {
    int pole;  // -1 or +1
    PathPolyline path;
};

struct CriticalGraph {
    QDParams params;
    ResidueSet res;
    PoleTypes pole_types;
    PropertyPReport prop_p;
    LaunchSpec launch_a, launch_b;
    std::vector<TrajectoryRecord> trajectories;  // the six critical ones
    std::vector<ShortTrajectory> shorts;
    std::vector<PoleLoop> loops;
    Topology topology = Topology::Other;
    bool consistent = true;  // shorts nonempty <=> property P satisfied
    std::vector<std::string> warnings;
};

LaunchSpec launch_directions(const QDParams& p, cplx zero, const Tolerances& tol = {});

/// Integrate one horizontal trajectory from `start` in the field direction
/// closest to `dir`, classifying its terminal fate.
TrajectoryRecord trace(const QDParams& p, cplx start, cplx dir, const StepLimits& lim = {});

/// Merge a matched pair of zero-to-zero traces into one refined polyline from
/// a to b with endpoint gaps driven below 1e-6 * scale. Throws when the pair
/// is not mutually consistent.
PathPolyline refine_short(const QDParams& p, const TrajectoryRecord& forward,
                          const TrajectoryRecord& backward, double* gap_out = nullptr,
                          const StepLimits& lim = {});

/// Trace all six critical trajectories, refine short candidates, probe for
/// closed loops around circle-type poles, classify the topology and
/// cross-check against property_p.
CriticalGraph build_graph(const QDParams& p, const StepLimits& lim = {}, const Tolerances& tol = {});

}  // namespace qdt
