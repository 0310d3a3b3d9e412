#include "qdt/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "qdt/branch.hpp"
#include "qdt/io.hpp"

namespace qdt {

const char* fate_name(Fate f) {
    switch (f) {
        case Fate::ToPoleMinus1: return "to-pole-minus1";
        case Fate::ToPolePlus1: return "to-pole-plus1";
        case Fate::ToInfinity: return "to-infinity";
        case Fate::ToOtherZero: return "to-other-zero";
        case Fate::ClosedLoop: return "closed-loop";
        case Fate::Truncated: return "truncated";
    }
    return "?";
}

const char* topology_name(Topology t) {
    switch (t) {
        case Topology::OneShortTwoInfinite: return "one-short-two-infinite";
        case Topology::TwoShortJordanCurve: return "two-short-jordan-curve";
        case Topology::RealLoopsPlusSegment: return "real-loops-plus-segment";
        case Topology::RealLoopsCommonEdge: return "real-loops-common-edge";
        case Topology::NoShort: return "no-short";
        case Topology::Other: return "other";
    }
    return "?";
}

LaunchSpec launch_directions(const QDParams& p, cplx zero, const Tolerances& tol) {
    const double unit = 1.0 + p.scale();
    if (std::abs(zero - p.a) > 1e-9 * unit && std::abs(zero - p.b) > 1e-9 * unit)
        throw std::invalid_argument("launch_directions: point is not a zero of the differential");
    const cplx d2 = zero * zero - 1.0;
    const cplx qprime = p.phi_prime(zero) / (d2 * d2);
    if (std::abs(qprime) < tol.tol_coincide)
        throw std::runtime_error("launch_directions: derivative vanishes at the zero (non-simple zero)");
    LaunchSpec spec;
    spec.zero = zero;
    const double base = -std::arg(qprime) / 3.0;
    for (int k = 0; k < 3; ++k) {
        double th = base + 2.0 * std::numbers::pi * k / 3.0;
        th = std::remainder(th, 2.0 * std::numbers::pi);
        spec.angles[k] = th;
    }
    return spec;
}

namespace {

constexpr cplx kI{0.0, 1.0};

cplx unit_or_throw(cplx v, const char* what) {
    const double m = std::abs(v);
    if (!(m > 0.0) || !std::isfinite(m)) throw std::runtime_error(std::string("tracer: ") + what);
    return v / m;
}

// Spatial hash over polyline segments for closed-loop detection.
struct SegmentGrid {
    double cell;
    std::unordered_map<long long, std::vector<int>> cells;

    explicit SegmentGrid(double cell_size) : cell(cell_size) {}

    static long long key(long long ix, long long iy) { return ix * 2654435761LL + iy * 40503LL; }

    void insert(int seg_index, cplx z0, cplx z1) {
        const long long x0 = llround(std::floor(std::min(z0.real(), z1.real()) / cell));
        const long long x1 = llround(std::floor(std::max(z0.real(), z1.real()) / cell));
        const long long y0 = llround(std::floor(std::min(z0.imag(), z1.imag()) / cell));
        const long long y1 = llround(std::floor(std::max(z0.imag(), z1.imag()) / cell));
        for (long long ix = x0; ix <= x1; ++ix)
            for (long long iy = y0; iy <= y1; ++iy) cells[key(ix, iy)].push_back(seg_index);
    }

    template <typename Fn>
    void for_near(cplx z, Fn&& fn) const {
        const long long cx = llround(std::floor(z.real() / cell));
        const long long cy = llround(std::floor(z.imag() / cell));
        for (long long ix = cx - 1; ix <= cx + 1; ++ix)
            for (long long iy = cy - 1; iy <= cy + 1; ++iy) {
                auto it = cells.find(key(ix, iy));
                if (it == cells.end()) continue;
                for (int idx : it->second) fn(idx);
            }
    }
};

// Dormand-Prince 5(4) pair.
struct RKResult {
    cplx y5, y4;
};

template <typename Field>
RKResult dopri_step(cplx z, double h, Field&& f) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                            e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

    const cplx k1 = f(z);
    const cplx k2 = f(z + h * (a21 * k1));
    const cplx k3 = f(z + h * (a31 * k1 + a32 * k2));
    const cplx k4 = f(z + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const cplx k5 = f(z + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const cplx k6 = f(z + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const cplx y5 = z + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const cplx k7 = f(y5);
    const cplx y4 = z + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    return {y5, y4};
}

struct TraceWork {
    const QDParams& p;
    const StepLimits& lim;
    double scale;

    cplx own_zero{}, other_zero{};
    bool has_own = false;

    double r_pole, delta_short, r_zero, delta_loop, min_sep, arm_len;
    double r_switch, r_inf;

    TraceWork(const QDParams& params, const StepLimits& limits, cplx start)
        : p(params), lim(limits), scale(params.scale()) {
        r_pole = lim.r_pole_scales * scale;
        delta_short = lim.delta_short_scales * scale;
        r_zero = lim.r_zero_scales * scale;
        delta_loop = lim.delta_loop_scales * scale;
        min_sep = lim.loop_min_sep > 0.0 ? lim.loop_min_sep : 0.1 * scale;
        r_switch = 20.0 * scale;
        r_inf = 50.0 * scale;
        const double da = std::abs(start - p.a), db = std::abs(start - p.b);
        if (std::min(da, db) < 0.01 * scale) {
            has_own = true;
            own_zero = da < db ? p.a : p.b;
            other_zero = da < db ? p.b : p.a;
        }
        arm_len = std::max(20.0 * lim.eps_launch_scales * scale,
                           0.02 * std::min(std::abs(p.a - p.b), scale));
    }

    double dist_to_critical(cplx z) const {
        return std::min({std::abs(z - p.a), std::abs(z - p.b), std::abs(z - 1.0), std::abs(z + 1.0)});
    }
};

}  // namespace

TrajectoryRecord trace(const QDParams& p, cplx start, cplx dir, const StepLimits& lim) {
    TraceWork w(p, lim, start);
    dir = unit_or_throw(dir, "launch direction is zero");

    TrajectoryRecord rec;
    rec.polyline.pts.push_back(start);
    rec.polyline.cum.push_back(0.0);

    // branch sign so the field points along dir
    cplx s_ref = std::sqrt(p.phi(start));
    if (std::abs(s_ref) == 0.0) throw std::invalid_argument("trace: start point is a zero of phi");
    {
        const cplx u = unit_or_throw((start * start - 1.0) / s_ref, "field undefined at start");
        if (u.real() * dir.real() + u.imag() * dir.imag() < 0.0) s_ref = -s_ref;
    }

    enum class Chart { Z, W };
    Chart chart = Chart::Z;
    cplx z = start;       // current point, z coordinates
    cplx wpt{};           // current point in the 1/z chart
    cplx t_ref{};         // branch of sqrt(lambda^2 (1-aw)(1-bw)) in the w chart
    double w_excursion = 0.0;
    int w_entries = 0;

    auto psi = [&p](cplx ww) { return p.lambda * p.lambda * (1.0 - p.a * ww) * (1.0 - p.b * ww); };

    SegmentGrid grid(0.05 * w.scale);
    std::vector<cplx> seg_dir;  // unit direction per stored segment

    double arclen = 0.0;
    double h = 1e-3 * w.scale;
    std::size_t steps = 0;
    int consecutive_rejects = 0;

    // refinement bookkeeping
    bool closing = false;
    double best_dist = std::numeric_limits<double>::infinity();
    std::size_t best_index = 0;

    const double atol = lim.atol_scales * w.scale;

    auto field_z = [&](cplx zz) -> cplx {
        const cplx s = nearest_sqrt(p.phi(zz), s_ref);
        return unit_or_throw((zz * zz - 1.0) / s, "field evaluation failed (zero of phi reached)");
    };
    auto field_w = [&](cplx ww) -> cplx {
        const cplx t = nearest_sqrt(psi(ww), t_ref);
        return unit_or_throw(ww * (1.0 - ww * ww) / t, "field evaluation failed in the far chart");
    };

    auto finish = [&](Fate f, double gap, std::string note) {
        rec.fate = f;
        rec.terminal_gap = gap;
        rec.arclength = arclen;
        rec.note = std::move(note);
        return rec;
    };

    while (true) {
        if (steps >= lim.max_steps)
            return finish(Fate::Truncated, 0.0, "step limit reached");
        if (arclen > lim.max_arclength_scales * w.scale)
            return finish(Fate::Truncated, 0.0, "arclength limit reached");

        if (chart == Chart::Z) {
            // ceiling keeps stages well inside the branch-tracking radius
            const double ceiling = std::max(0.35 * w.dist_to_critical(z), 1e-14 * w.scale);
            double h_try = std::min({h, ceiling, lim.h_max_scales * w.scale});

            RKResult r;
            try {
                r = dopri_step(z, h_try, field_z);
            } catch (const std::runtime_error&) {
                h = h_try / 4.0;
                if (++consecutive_rejects > 60)
                    throw std::runtime_error("trace: step underflow near z = " + format_complex(z));
                continue;
            }
            const double err = std::abs(r.y5 - r.y4) / (atol + lim.rtol * std::abs(z));
            if (err > 1.0) {
                h = h_try * std::max(0.2, 0.9 * std::pow(err, -0.2));
                if (++consecutive_rejects > 60)
                    throw std::runtime_error("trace: persistent step rejection near z = " +
                                             format_complex(z));
                continue;
            }
            consecutive_rejects = 0;
            const cplx z_new = r.y5;
            // branch update; reject the step if the root assignment is ambiguous
            const cplx s_new = nearest_sqrt(p.phi(z_new), s_ref);
            if (std::abs(s_new - s_ref) > std::abs(s_new + s_ref)) {
                h = h_try / 2.0;
                if (++consecutive_rejects > 60)
                    throw std::runtime_error("trace: branch continuation failed near z = " +
                                             format_complex(z_new));
                continue;
            }
            const cplx d_step = z_new - z;
            const cplx step_dir = unit_or_throw(d_step, "zero step");

            // closed-loop rejoin against earlier segments
            if (arclen > w.min_sep) {
                int hit = -1;
                double hit_dist = w.delta_loop;
                grid.for_near(z_new, [&](int idx) {
                    if (rec.polyline.cum[idx + 1] > arclen - w.min_sep) return;
                    const double d = point_segment_distance(z_new, rec.polyline.pts[idx],
                                                            rec.polyline.pts[idx + 1]);
                    if (d <= hit_dist &&
                        seg_dir[idx].real() * step_dir.real() + seg_dir[idx].imag() * step_dir.imag() >
                            0.999) {
                        hit = idx;
                        hit_dist = d;
                    }
                });
                if (hit >= 0) {
                    arclen += std::abs(d_step);
                    rec.polyline.pts.push_back(z_new);
                    rec.polyline.cum.push_back(arclen);
                    return finish(Fate::ClosedLoop, hit_dist, "rejoined earlier segment");
                }
            }

            grid.insert(int(rec.polyline.pts.size()) - 1, z, z_new);
            seg_dir.push_back(step_dir);
            z = z_new;
            s_ref = s_new;
            arclen += std::abs(d_step);
            rec.polyline.pts.push_back(z);
            rec.polyline.cum.push_back(arclen);
            rec.est_error += std::abs(r.y5 - r.y4);
            ++steps;
            h = h_try * std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));

            // terminal detections
            if (std::abs(z - 1.0) <= w.r_pole)
                return finish(Fate::ToPolePlus1, std::abs(z - 1.0), "");
            if (std::abs(z + 1.0) <= w.r_pole)
                return finish(Fate::ToPoleMinus1, std::abs(z + 1.0), "");

            if (w.has_own && arclen > w.arm_len) {
                const double d_other = std::abs(z - w.other_zero);
                if (lim.track_min_approach) {
                    if (d_other < 1e-3 * w.scale) {
                        closing = true;
                        if (d_other < best_dist) {
                            best_dist = d_other;
                            best_index = rec.polyline.pts.size() - 1;
                        }
                    }
                    if (closing && (d_other > 3.0 * best_dist || d_other > 2e-3 * w.scale) &&
                        best_dist < std::numeric_limits<double>::infinity()) {
                        rec.polyline.pts.resize(best_index + 1);
                        rec.polyline.cum.resize(best_index + 1);
                        rec.arclength = rec.polyline.cum.back();
                        rec.fate = Fate::ToOtherZero;
                        rec.terminal_gap = best_dist;
                        return rec;
                    }
                    if (closing && d_other < 2e-9 * w.scale) {
                        rec.fate = Fate::ToOtherZero;
                        rec.terminal_gap = d_other;
                        rec.arclength = arclen;
                        return rec;
                    }
                } else if (d_other <= w.delta_short) {
                    return finish(Fate::ToOtherZero, d_other, "");
                }
                if (std::abs(z - w.own_zero) <= w.r_zero)
                    return finish(Fate::ClosedLoop, std::abs(z - w.own_zero),
                                  "returns to originating zero");
            } else if (!w.has_own && arclen > w.arm_len) {
                const double da = std::abs(z - p.a), db = std::abs(z - p.b);
                if (std::min(da, db) <= w.r_zero)
                    return finish(Fate::ToOtherZero, std::min(da, db), "entered zero disk");
            }

            if (std::abs(z) > w.r_switch) {
                if (++w_entries > 100) return finish(Fate::Truncated, 0.0, "chart thrash");
                chart = Chart::W;
                wpt = 1.0 / z;
                const cplx u_last = field_z(z);
                const cplx want = unit_or_throw(-wpt * wpt * u_last, "chart switch");
                const cplx t_cand = std::sqrt(psi(wpt));
                const cplx v_plus = unit_or_throw(wpt * (1.0 - wpt * wpt) / t_cand, "chart switch");
                t_ref = (v_plus.real() * want.real() + v_plus.imag() * want.imag() >= 0.0) ? t_cand
                                                                                           : -t_cand;
                w_excursion = 0.0;
                h = 0.1 * std::abs(wpt);
            }
        } else {
            // far chart: w = 1/z, double pole at w = 0
            const double ceiling = std::max(0.3 * std::abs(wpt), 1e-18);
            double h_try = std::min(h, ceiling);

            RKResult r;
            try {
                r = dopri_step(wpt, h_try, field_w);
            } catch (const std::runtime_error&) {
                h = h_try / 4.0;
                if (++consecutive_rejects > 60)
                    throw std::runtime_error("trace: step underflow in the far chart");
                continue;
            }
            const double err = std::abs(r.y5 - r.y4) / (lim.atol_scales / w.scale + lim.rtol * std::abs(wpt));
            if (err > 1.0) {
                h = h_try * std::max(0.2, 0.9 * std::pow(err, -0.2));
                if (++consecutive_rejects > 60)
                    throw std::runtime_error("trace: persistent step rejection in the far chart");
                continue;
            }
            consecutive_rejects = 0;
            const cplx w_new = r.y5;
            const cplx t_new = nearest_sqrt(psi(w_new), t_ref);
            if (std::abs(t_new - t_ref) > std::abs(t_new + t_ref)) {
                h = h_try / 2.0;
                if (++consecutive_rejects > 60)
                    throw std::runtime_error("trace: branch continuation failed in the far chart");
                continue;
            }
            const cplx z_new = 1.0 / w_new;
            const cplx d_step = z_new - z;
            grid.insert(int(rec.polyline.pts.size()) - 1, z, z_new);
            seg_dir.push_back(unit_or_throw(d_step, "zero step"));
            w_excursion += std::abs(w_new - wpt);
            wpt = w_new;
            t_ref = t_new;
            z = z_new;
            arclen += std::abs(d_step);
            rec.polyline.pts.push_back(z);
            rec.polyline.cum.push_back(arclen);
            ++steps;
            h = h_try * std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));

            if (std::abs(wpt) <= 1.0 / w.r_inf)
                return finish(Fate::ToInfinity, std::abs(wpt), "");
            if (w_excursion > 100.0 / w.r_switch)
                return finish(Fate::Truncated, 0.0, "far-chart excursion limit");
            if (std::abs(z) < 0.9 * w.r_switch) {
                chart = Chart::Z;
                const cplx v_last = field_w(wpt);
                const cplx want = unit_or_throw(-v_last / (wpt * wpt), "chart switch");
                const cplx s_cand = std::sqrt(p.phi(z));
                const cplx u_plus = unit_or_throw((z * z - 1.0) / s_cand, "chart switch");
                s_ref = (u_plus.real() * want.real() + u_plus.imag() * want.imag() >= 0.0) ? s_cand
                                                                                           : -s_cand;
                h = 0.05 * w.scale;
            }
        }
    }
}

PathPolyline refine_short(const QDParams& p, const TrajectoryRecord& forward,
                          const TrajectoryRecord& backward, double* gap_out, const StepLimits& lim) {
    if (forward.fate != Fate::ToOtherZero || backward.fate != Fate::ToOtherZero)
        throw std::invalid_argument("refine_short: both traces must end at the other zero");
    const double scale = p.scale();
    const double delta_match = 5e-2 * scale;
    const std::size_t stride = 1 + std::max(forward.polyline.size(), backward.polyline.size()) / 400;
    if (hausdorff_distance(forward.polyline, backward.polyline, stride) > delta_match)
        throw std::invalid_argument(
            "refine_short: traces are not mutually consistent (distinct trajectories)");

    const cplx own = forward.zero_id == 0 ? p.a : p.b;
    const cplx other = forward.zero_id == 0 ? p.b : p.a;

    LaunchSpec spec = launch_directions(p, own);
    const double theta = spec.angles[forward.angle_index];

    PathPolyline best_poly;
    double best_gap = std::numeric_limits<double>::infinity();
    for (auto [eps_scales, rtol] : {std::pair{1e-7, 1e-12}, std::pair{1e-8, 1e-13}}) {
        StepLimits tight = lim;
        tight.rtol = rtol;
        tight.atol_scales = rtol;
        tight.eps_launch_scales = eps_scales;
        tight.track_min_approach = true;
        const cplx dir = std::polar(1.0, theta);
        const cplx start = own + eps_scales * scale * dir;
        TrajectoryRecord ref = trace(p, start, dir, tight);
        if (ref.fate == Fate::ToOtherZero && ref.terminal_gap < best_gap) {
            best_gap = ref.terminal_gap;
            best_poly = std::move(ref.polyline);
        }
        if (best_gap < 0.9e-6 * scale) break;
    }
    if (!std::isfinite(best_gap))
        throw std::runtime_error("refine_short: refinement lost the trajectory");

    // snap endpoints onto the zeros
    std::vector<cplx> pts;
    pts.reserve(best_poly.size() + 2);
    pts.push_back(own);
    pts.insert(pts.end(), best_poly.pts.begin(), best_poly.pts.end());
    pts.push_back(other);
    PathPolyline out = PathPolyline::from_points(std::move(pts));
    if (forward.zero_id == 1) out = out.reversed();  // orient a -> b
    if (gap_out) *gap_out = best_gap;
    return out;
}

namespace {

Topology classify_topology(const QDParams& p, const std::vector<ShortTrajectory>& shorts,
                           const PoleTypes& pt, int* union_w_m1, int* union_w_p1) {
    if (shorts.empty()) return Topology::NoShort;
    if (shorts.size() == 1) {
        const double unit = 1.0 + p.scale();
        const bool real_conf = std::abs(p.a.imag()) < 1e-8 * unit && std::abs(p.b.imag()) < 1e-8 * unit &&
                               std::abs((p.lambda * p.lambda).imag()) < 1e-8 * unit;
        if (real_conf && pt.at_minus1 == PoleType::Circle && pt.at_plus1 == PoleType::Circle)
            return Topology::RealLoopsPlusSegment;
        return Topology::OneShortTwoInfinite;
    }
    if (shorts.size() == 2) {
        std::vector<cplx> loop_pts = shorts[0].path.pts;
        const PathPolyline rev = shorts[1].path.reversed();
        loop_pts.insert(loop_pts.end(), rev.pts.begin(), rev.pts.end());
        const PathPolyline loop = PathPolyline::from_points(std::move(loop_pts));
        try {
            const int wm = winding_number(loop, cplx(-1.0, 0.0));
            const int wp = winding_number(loop, cplx(1.0, 0.0));
            if (union_w_m1) *union_w_m1 = wm;
            if (union_w_p1) *union_w_p1 = wp;
            if (std::abs(wm) == 1 && std::abs(wp) == 1) return Topology::TwoShortJordanCurve;
        } catch (const std::exception&) {
        }
        return Topology::Other;
    }
    if (shorts.size() == 3) return Topology::RealLoopsCommonEdge;
    return Topology::Other;
}

}  // namespace

CriticalGraph build_graph(const QDParams& p, const StepLimits& lim, const Tolerances& tol) {
    CriticalGraph g;
    g.params = p;
    g.res = residues(p, tol);
    g.pole_types = classify_poles(g.res, tol);
    g.prop_p = property_p(p, tol);
    g.launch_a = launch_directions(p, p.a, tol);
    g.launch_b = launch_directions(p, p.b, tol);

    const double scale = p.scale();
    const double eps = lim.eps_launch_scales * scale;

    for (int zi = 0; zi < 2; ++zi) {
        const LaunchSpec& spec = zi == 0 ? g.launch_a : g.launch_b;
        for (int k = 0; k < 3; ++k) {
            const cplx dir = std::polar(1.0, spec.angles[k]);
            TrajectoryRecord rec = trace(p, spec.zero + eps * dir, dir, lim);
            rec.zero_id = zi;
            rec.angle_index = k;
            if (rec.fate == Fate::Truncated)
                g.warnings.push_back("trajectory " + std::to_string(zi * 3 + k) +
                                     " truncated: " + rec.note);
            g.trajectories.push_back(std::move(rec));
        }
    }

    // pair zero-to-zero candidates from the two sides and refine each pair
    std::vector<int> cand_a, cand_b;
    for (int i = 0; i < 6; ++i) {
        if (g.trajectories[i].fate != Fate::ToOtherZero) continue;
        (g.trajectories[i].zero_id == 0 ? cand_a : cand_b).push_back(i);
    }
    struct Pair {
        int ia, ib;
        double d;
    };
    std::vector<Pair> pairs;
    for (int ia : cand_a)
        for (int ib : cand_b) {
            const std::size_t stride =
                1 + std::max(g.trajectories[ia].polyline.size(), g.trajectories[ib].polyline.size()) / 400;
            pairs.push_back({ia, ib,
                             hausdorff_distance(g.trajectories[ia].polyline,
                                                g.trajectories[ib].polyline, stride)});
        }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& u, const Pair& v) { return u.d < v.d; });
    std::vector<bool> used_a(6, false), used_b(6, false);
    std::vector<std::pair<int, int>> matched;
    for (const auto& pr : pairs) {
        if (used_a[pr.ia] || used_b[pr.ib] || pr.d > 5e-2 * scale) continue;
        used_a[pr.ia] = used_b[pr.ib] = true;
        matched.emplace_back(pr.ia, pr.ib);
    }
    std::sort(matched.begin(), matched.end());

    for (auto [ia, ib] : matched) {
        double gap = 0.0;
        try {
            PathPolyline path = refine_short(p, g.trajectories[ia], g.trajectories[ib], &gap, lim);
            if (gap <= 1e-6 * scale) {
                ShortTrajectory st;
                st.path = std::move(path);
                st.endpoint_gap = gap;
                st.period = classify_arc(p, st.path, tol);
                g.shorts.push_back(std::move(st));
                continue;
            }
            g.warnings.push_back("short candidate rejected: refined endpoint gap " +
                                 format_double(gap / scale) + " scales");
        } catch (const std::exception& e) {
            g.warnings.push_back(std::string("short candidate rejected: ") + e.what());
        }
        // not a short after all: re-resolve the true fates with the candidate
        // disk disabled
        for (int idx : {ia, ib}) {
            StepLimits redo = lim;
            redo.delta_short_scales = 2e-9;
            redo.r_zero_scales = 2e-9;
            TrajectoryRecord& old = g.trajectories[idx];
            const LaunchSpec& spec = old.zero_id == 0 ? g.launch_a : g.launch_b;
            const cplx dir = std::polar(1.0, spec.angles[old.angle_index]);
            TrajectoryRecord rec = trace(p, spec.zero + eps * dir, dir, redo);
            rec.zero_id = old.zero_id;
            rec.angle_index = old.angle_index;
            g.trajectories[idx] = std::move(rec);
        }
    }

    // leftover unmatched candidates: attempt a solo refinement
    for (int i = 0; i < 6; ++i) {
        TrajectoryRecord& t = g.trajectories[i];
        if (t.fate != Fate::ToOtherZero) continue;
        const bool used = (t.zero_id == 0) ? used_a[i] : used_b[i];
        if (used) continue;
        double gap = 0.0;
        try {
            PathPolyline path = refine_short(p, t, t, &gap, lim);
            if (gap <= 1e-6 * scale) {
                ShortTrajectory st;
                st.path = std::move(path);
                st.endpoint_gap = gap;
                st.period = classify_arc(p, st.path, tol);
                g.shorts.push_back(std::move(st));
                g.warnings.push_back("short confirmed from one side only (trajectory " +
                                     std::to_string(i) + ")");
                continue;
            }
        } catch (const std::exception&) {
        }
        g.warnings.push_back("unpaired zero-to-zero candidate (trajectory " + std::to_string(i) + ")");
    }

    // probe for a closed regular trajectory around each circle-type pole
    for (int pole : {-1, +1}) {
        const PoleType kind = pole < 0 ? g.pole_types.at_minus1 : g.pole_types.at_plus1;
        if (kind != PoleType::Circle) continue;
        const cplx pc(double(pole), 0.0);
        double rho = 0.3 * std::min({std::abs(pc - p.a), std::abs(pc - p.b), 1.0});
        bool found = false;
        for (int attempt = 0; attempt < 3 && !found; ++attempt, rho *= 0.5) {
            const cplx start = pc + rho * std::polar(1.0, 0.4);
            const cplx dir = kI * std::polar(1.0, 0.4);
            StepLimits probe = lim;
            probe.loop_min_sep = 3.0 * rho;
            probe.max_arclength_scales = 100.0;
            try {
                TrajectoryRecord rec = trace(p, start, dir, probe);
                if (rec.fate == Fate::ClosedLoop && rec.note == "rejoined earlier segment") {
                    g.loops.push_back(PoleLoop{pole, std::move(rec.polyline)});
                    found = true;
                }
            } catch (const std::exception&) {
            }
        }
        if (!found)
            g.warnings.push_back(std::string("no closed loop found around the circle-type pole ") +
                                 (pole < 0 ? "-1" : "+1"));
    }

    for (auto& t : g.trajectories) t.im_defect = im_defect(p, t.polyline);

    g.topology = classify_topology(p, g.shorts, g.pole_types, nullptr, nullptr);
    g.consistent = g.shorts.empty() == !g.prop_p.satisfied;
    if (!g.consistent)
        g.warnings.push_back("analytic and geometric short-trajectory verdicts disagree");
    return g;
}

}  // namespace qdt
