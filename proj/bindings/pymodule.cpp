#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qdt/branch.hpp"
#include "qdt/io.hpp"
#include "qdt/jacobi.hpp"
#include "qdt/periods.hpp"
#include "qdt/qdiff.hpp"
#include "qdt/tracer.hpp"

namespace py = pybind11;
using namespace qdt;

PYBIND11_MODULE(_core, m) {
    m.doc() = "critical graphs, periods and zero distributions of the quadratic differential "
              "lambda^2 (z-a)(z-b)/(z^2-1)^2 dz^2";

    py::class_<Tolerances>(m, "Tolerances")
        .def(py::init<>())
        .def_readwrite("tol_root", &Tolerances::tol_root)
        .def_readwrite("tol_imag", &Tolerances::tol_imag)
        .def_readwrite("tol_p", &Tolerances::tol_p)
        .def_readwrite("tol_coincide", &Tolerances::tol_coincide)
        .def_readwrite("tol_branch", &Tolerances::tol_branch)
        .def_readwrite("tol_traj", &Tolerances::tol_traj)
        .def_readwrite("tol_period", &Tolerances::tol_period);

    py::class_<QDParams>(m, "QDParams")
        .def_readonly("a", &QDParams::a)
        .def_readonly("b", &QDParams::b)
        .def_readonly("lam", &QDParams::lambda)
        .def_property_readonly("origin",
                               [](const QDParams& p) -> py::object {
                                   if (!p.origin) return py::none();
                                   return py::make_tuple(p.origin->A, p.origin->B);
                               })
        .def("scale", &QDParams::scale)
        .def("phi", &QDParams::phi)
        .def("q", &QDParams::q)
        .def("__repr__", [](const QDParams& p) {
            return "QDParams(a=" + format_complex(p.a) + ", b=" + format_complex(p.b) +
                   ", lam=" + format_complex(p.lambda) + ")";
        });

    py::class_<ResidueSet>(m, "ResidueSet")
        .def_readonly("res_minus1", &ResidueSet::res_minus1)
        .def_readonly("res_plus1", &ResidueSet::res_plus1)
        .def_readonly("res_inf", &ResidueSet::res_inf);

    py::enum_<PoleType>(m, "PoleType")
        .value("Circle", PoleType::Circle)
        .value("Radial", PoleType::Radial)
        .value("LogSpiral", PoleType::LogSpiral);

    py::class_<PoleTypes>(m, "PoleTypes")
        .def_readonly("at_minus1", &PoleTypes::at_minus1)
        .def_readonly("at_plus1", &PoleTypes::at_plus1)
        .def_readonly("at_inf", &PoleTypes::at_inf);

    py::class_<PropertyPReport>(m, "PropertyPReport")
        .def_readonly("values", &PropertyPReport::values)
        .def_readonly("im_parts", &PropertyPReport::im_parts)
        .def_readonly("sign_pairs", &PropertyPReport::sign_pairs)
        .def_readonly("satisfied", &PropertyPReport::satisfied)
        .def_readonly("satisfied_classes", &PropertyPReport::satisfied_classes)
        .def_readonly("class_labels", &PropertyPReport::class_labels);

    py::class_<PathPolyline>(m, "PathPolyline")
        .def(py::init([](std::vector<cplx> pts) { return PathPolyline::from_points(std::move(pts)); }))
        .def_readonly("pts", &PathPolyline::pts)
        .def_readonly("cum", &PathPolyline::cum)
        .def("length", &PathPolyline::length)
        .def("reversed", &PathPolyline::reversed)
        .def("__len__", [](const PathPolyline& p) { return p.pts.size(); });

    py::class_<BranchState>(m, "BranchState")
        .def_readonly("z", &BranchState::z)
        .def_readonly("s", &BranchState::s);

    py::class_<LaunchSpec>(m, "LaunchSpec")
        .def_readonly("zero", &LaunchSpec::zero)
        .def_readonly("angles", &LaunchSpec::angles);

    py::class_<StepLimits>(m, "StepLimits")
        .def(py::init<>())
        .def_readwrite("max_steps", &StepLimits::max_steps)
        .def_readwrite("max_arclength_scales", &StepLimits::max_arclength_scales)
        .def_readwrite("rtol", &StepLimits::rtol)
        .def_readwrite("atol_scales", &StepLimits::atol_scales)
        .def_readwrite("eps_launch_scales", &StepLimits::eps_launch_scales);

    py::enum_<Fate>(m, "Fate")
        .value("ToPoleMinus1", Fate::ToPoleMinus1)
        .value("ToPolePlus1", Fate::ToPolePlus1)
        .value("ToInfinity", Fate::ToInfinity)
        .value("ToOtherZero", Fate::ToOtherZero)
        .value("ClosedLoop", Fate::ClosedLoop)
        .value("Truncated", Fate::Truncated);

    py::enum_<Topology>(m, "Topology")
        .value("OneShortTwoInfinite", Topology::OneShortTwoInfinite)
        .value("TwoShortJordanCurve", Topology::TwoShortJordanCurve)
        .value("RealLoopsPlusSegment", Topology::RealLoopsPlusSegment)
        .value("RealLoopsCommonEdge", Topology::RealLoopsCommonEdge)
        .value("NoShort", Topology::NoShort)
        .value("Other", Topology::Other);

    py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
        .def_readonly("zero_id", &TrajectoryRecord::zero_id)
        .def_readonly("angle_index", &TrajectoryRecord::angle_index)
        .def_readonly("polyline", &TrajectoryRecord::polyline)
        .def_readonly("fate", &TrajectoryRecord::fate)
        .def_readonly("terminal_gap", &TrajectoryRecord::terminal_gap)
        .def_readonly("arclength", &TrajectoryRecord::arclength)
        .def_readonly("est_error", &TrajectoryRecord::est_error)
        .def_readonly("im_defect", &TrajectoryRecord::im_defect)
        .def_readonly("note", &TrajectoryRecord::note);

    py::class_<PeriodReport>(m, "PeriodReport")
        .def_readonly("value", &PeriodReport::value)
        .def_readonly("est_error", &PeriodReport::est_error)
        .def_readonly("sign_resolved", &PeriodReport::sign_resolved)
        .def_readonly("matched", &PeriodReport::matched)
        .def_readonly("matched_class", &PeriodReport::matched_class)
        .def_readonly("matched_sign", &PeriodReport::matched_sign)
        .def_readonly("class_value", &PeriodReport::class_value)
        .def_readonly("winding_minus1", &PeriodReport::winding_minus1)
        .def_readonly("winding_plus1", &PeriodReport::winding_plus1)
        .def_readonly("winding_a", &PeriodReport::winding_a)
        .def_readonly("winding_b", &PeriodReport::winding_b);

    py::class_<ShortTrajectory>(m, "ShortTrajectory")
        .def_readonly("path", &ShortTrajectory::path)
        .def_readonly("endpoint_gap", &ShortTrajectory::endpoint_gap)
        .def_readonly("period", &ShortTrajectory::period);

    py::class_<PoleLoop>(m, "PoleLoop")
        .def_readonly("pole", &PoleLoop::pole)
        .def_readonly("path", &PoleLoop::path);

    py::class_<CriticalGraph>(m, "CriticalGraph")
        .def_readonly("params", &CriticalGraph::params)
        .def_readonly("res", &CriticalGraph::res)
        .def_readonly("pole_types", &CriticalGraph::pole_types)
        .def_readonly("prop_p", &CriticalGraph::prop_p)
        .def_readonly("trajectories", &CriticalGraph::trajectories)
        .def_readonly("shorts", &CriticalGraph::shorts)
        .def_readonly("loops", &CriticalGraph::loops)
        .def_readonly("topology", &CriticalGraph::topology)
        .def_readonly("consistent", &CriticalGraph::consistent)
        .def_readonly("warnings", &CriticalGraph::warnings)
        .def("to_json", [](const CriticalGraph& g) { return graph_to_json(g).dump(2); });

    py::class_<PolySpec>(m, "PolySpec")
        .def_readonly("n", &PolySpec::n)
        .def_readonly("alpha", &PolySpec::alpha)
        .def_readonly("beta", &PolySpec::beta)
        .def_readonly("coeffs", &PolySpec::coeffs)
        .def_readonly("effective_degree", &PolySpec::effective_degree)
        .def_readonly("degree_dropped", &PolySpec::degree_dropped)
        .def_readonly("condition", &PolySpec::condition)
        .def("eval", &PolySpec::eval);

    py::class_<RootSet>(m, "RootSet")
        .def_readonly("roots", &RootSet::roots)
        .def_readonly("residual", &RootSet::residual)
        .def_readonly("iterations", &RootSet::iterations)
        .def_readonly("converged", &RootSet::converged);

    py::class_<MeasureComparison>(m, "MeasureComparison")
        .def_readonly("n", &MeasureComparison::n)
        .def_readonly("mean_dist", &MeasureComparison::mean_dist)
        .def_readonly("max_dist", &MeasureComparison::max_dist)
        .def_readonly("outliers", &MeasureComparison::outliers)
        .def_readonly("mass_check", &MeasureComparison::mass_check)
        .def_readonly("cauchy_residuals", &MeasureComparison::cauchy_residuals);

    m.def("validate", &validate, py::arg("a"), py::arg("b"), py::arg("lam"),
          py::arg("tol") = Tolerances{});
    m.def("from_jacobi", &from_jacobi, py::arg("A"), py::arg("B"), py::arg("tol") = Tolerances{});
    m.def("r_ab", &r_ab, py::arg("A"), py::arg("B"), py::arg("z"));
    m.def("r_ab_zeros", &r_ab_zeros, py::arg("A"), py::arg("B"));
    m.def("residues", &residues, py::arg("params"), py::arg("tol") = Tolerances{});
    m.def("classify_poles", &classify_poles, py::arg("residues"), py::arg("tol") = Tolerances{});
    m.def("property_p", &property_p, py::arg("params"), py::arg("tol") = Tolerances{});

    m.def("root_at_infinity", &root_at_infinity, py::arg("params"), py::arg("z"));
    m.def("continue_along", &continue_along, py::arg("params"), py::arg("start"), py::arg("path"),
          py::arg("min_clearance") = -1.0);
    m.def(
        "side_values",
        [](const QDParams& p, const PathPolyline& arc, double offset) {
            const SideValues sv = side_values(p, arc, offset);
            return py::make_tuple(sv.plus, sv.minus);
        },
        py::arg("params"), py::arg("arc"), py::arg("offset") = -1.0);

    m.def("launch_directions", &launch_directions, py::arg("params"), py::arg("zero"),
          py::arg("tol") = Tolerances{});
    m.def("trace", &trace, py::arg("params"), py::arg("start"), py::arg("direction"),
          py::arg("limits") = StepLimits{});
    m.def("build_graph", &build_graph, py::arg("params"), py::arg("limits") = StepLimits{},
          py::arg("tol") = Tolerances{});

    m.def("arc_period", &arc_period, py::arg("params"), py::arg("arc"), py::arg("endpoint_singular"),
          py::arg("tol") = Tolerances{});
    m.def("loop_period", &loop_period, py::arg("params"), py::arg("loop"), py::arg("tol") = Tolerances{});
    m.def("classify_arc", &classify_arc, py::arg("params"), py::arg("arc"), py::arg("tol") = Tolerances{});
    m.def("reference_arc", &reference_arc, py::arg("params"));
    m.def("im_defect", &im_defect, py::arg("params"), py::arg("polyline"));
    m.def(
        "teich_check",
        [](const std::vector<std::pair<int, double>>& corners, const std::vector<int>& interior) {
            QDPolygon poly;
            for (auto [n, theta] : corners) poly.corners.push_back({n, theta});
            poly.interior = interior;
            const TeichResult r = teich_check(poly);
            return py::make_tuple(r.lhs, r.rhs, r.consistent);
        },
        py::arg("corners"), py::arg("interior"));

    m.def("jacobi_build", &build, py::arg("n"), py::arg("alpha"), py::arg("beta"));
    m.def("jacobi_roots", &roots, py::arg("spec"));
    m.def("cauchy", &cauchy, py::arg("roots"), py::arg("z"));
    m.def("cauchy_ratio", &cauchy_ratio, py::arg("spec"), py::arg("z"));
    m.def("quadratic_residual", &quadratic_residual, py::arg("A"), py::arg("B"), py::arg("z"),
          py::arg("c"));
    m.def("compare", &compare, py::arg("A"), py::arg("B"), py::arg("n"), py::arg("graph"));

    m.def("parse_complex", [](const std::string& s) {
        cplx z;
        if (!parse_complex(s, z)) throw py::value_error("malformed complex literal: " + s);
        return z;
    });
}
