#pragma once

#include <map>
#include <string>
#include <string_view>

#include "qdt/jacobi.hpp"
#include "qdt/tracer.hpp"

#include <json.hpp>

namespace qdt {

/// Parse "RE", "RE+IMi", "RE-IMi" or a pure-imaginary "IMi" literal with a
/// locale-independent decimal point. Returns false on malformed input.
bool parse_complex(std::string_view text, cplx& out);

/// Shortest round-trip decimal form, "re" or "re+imi"/"re-imi".
std::string format_complex(cplx z);

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

struct FigureWindow {
    cplx center;
    double half_width = 0.0;
};

/// Window containing a, b, -1, 1 with a margin.
FigureWindow default_window(const QDParams& p);

void write_graph_svg(const std::string& path, const CriticalGraph& g, const FigureWindow& win);
void write_graph_csv(const std::string& path, const CriticalGraph& g);
nlohmann::ordered_json graph_to_json(const CriticalGraph& g);

/// Rows of a polyline CSV (header traj_id,s,re,im) grouped by trajectory id.
std::map<int, PathPolyline> read_polylines_csv(const std::string& path);

void write_roots_csv(const std::string& path, const RootSet& rs);
nlohmann::ordered_json comparison_to_json(const MeasureComparison& mc);
void write_overlay_svg(const std::string& path, const CriticalGraph& g, const RootSet& rs,
                       const FigureWindow& win);

// Trajectory ids in the CSV: six critical trajectories are 0..5, shorts are
// 100+, pole loops 200+.
inline constexpr int kShortIdBase = 100;
inline constexpr int kLoopIdBase = 200;

}  // namespace qdt
