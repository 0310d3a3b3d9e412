#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qdt/io.hpp"
#include "qdt/jacobi.hpp"
#include "qdt/periods.hpp"
#include "qdt/tracer.hpp"
#include "qdt/verify.hpp"

namespace {

using qdt::cplx;

struct ParamFlags {
    std::string a, b, lambda, A, B;
};

cplx parse_or_fail(const std::string& text, const char* flag) {
    cplx z;
    if (!qdt::parse_complex(text, z))
        throw CLI::ValidationError(std::string(flag) + ": malformed complex literal '" + text +
                                   "' (expected RE, RE+IMi or IMi)");
    return z;
}

qdt::QDParams params_from_flags(const ParamFlags& f, const qdt::Tolerances& tol) {
    const bool direct = !f.a.empty() || !f.b.empty() || !f.lambda.empty();
    const bool origin = !f.A.empty() || !f.B.empty();
    if (direct == origin)
        throw CLI::ValidationError("give exactly one parameter source: --a/--b/--lambda or --A/--B");
    if (direct) {
        if (f.a.empty() || f.b.empty() || f.lambda.empty())
            throw CLI::ValidationError("--a, --b and --lambda must all be given");
        return qdt::validate(parse_or_fail(f.a, "--a"), parse_or_fail(f.b, "--b"),
                             parse_or_fail(f.lambda, "--lambda"), tol);
    }
    if (f.A.empty() || f.B.empty()) throw CLI::ValidationError("--A and --B must both be given");
    return qdt::from_jacobi(parse_or_fail(f.A, "--A"), parse_or_fail(f.B, "--B"), tol);
}

void add_param_flags(CLI::App* cmd, ParamFlags& f) {
    cmd->add_option("--a", f.a, "zero a as a complex literal, e.g. 1-1i");
    cmd->add_option("--b", f.b, "zero b as a complex literal");
    cmd->add_option("--lambda", f.lambda, "leading scale as a complex literal");
    cmd->add_option("--A", f.A, "parameter A of the parametrized family");
    cmd->add_option("--B", f.B, "parameter B of the parametrized family");
}

struct TolFlags {
    double tol_root = -1, tol_p = -1, tol_period = -1, tol_traj = -1;
    qdt::Tolerances resolve() const {
        qdt::Tolerances t;
        if (tol_root > 0) t.tol_root = tol_root;
        if (tol_p > 0) t.tol_p = tol_p;
        if (tol_period > 0) t.tol_period = tol_period;
        if (tol_traj > 0) t.tol_traj = tol_traj;
        return t;
    }
};

void add_tol_flags(CLI::App* cmd, TolFlags& t) {
    cmd->add_option("--tol-root", t.tol_root, "relative tolerance for algebraic identities");
    cmd->add_option("--tol-p", t.tol_p, "tolerance of the vanishing-imaginary-part test");
    cmd->add_option("--tol-period", t.tol_period, "tolerance for period/class matching");
    cmd->add_option("--tol-traj", t.tol_traj, "trajectory invariant tolerance per unit scale");
}

qdt::FigureWindow window_from_flags(const qdt::QDParams& p, const std::string& center,
                                    double half_width) {
    qdt::FigureWindow win = qdt::default_window(p);
    if (!center.empty()) win.center = parse_or_fail(center, "--window-center");
    if (half_width > 0) win.half_width = half_width;
    return win;
}

int cmd_check_p(const ParamFlags& pf, const TolFlags& tf) {
    const qdt::Tolerances tol = tf.resolve();
    const qdt::QDParams p = params_from_flags(pf, tol);
    const qdt::PropertyPReport rep = qdt::property_p(p, tol);
    std::printf("parameters: a=%s b=%s lambda=%s\n", qdt::format_complex(p.a).c_str(),
                qdt::format_complex(p.b).c_str(), qdt::format_complex(p.lambda).c_str());
    if (p.origin)
        std::printf("origin: A=%s B=%s\n", qdt::format_complex(p.origin->A).c_str(),
                    qdt::format_complex(p.origin->B).c_str());
    std::printf("%-8s %-28s %-14s %s\n", "signs", "value", "imag part", "class");
    for (int k = 0; k < 4; ++k) {
        const auto [s1, s2] = rep.sign_pairs[k];
        std::printf("(%+d,%+d)  %-28s %-14s %s\n", s1, s2,
                    qdt::format_complex(rep.values[k]).c_str(),
                    qdt::format_double(rep.im_parts[k]).c_str(), rep.class_labels[k].c_str());
    }
    std::printf("satisfied: %s", rep.satisfied ? "yes" : "no");
    if (rep.satisfied) {
        std::printf(" via");
        for (int idx : rep.satisfied_classes) std::printf(" %s", rep.class_labels[idx].c_str());
    }
    std::printf("\n");
    return 0;
}

int cmd_graph(const ParamFlags& pf, const TolFlags& tf, const std::string& out,
              const std::string& wcenter, double whalf) {
    const qdt::Tolerances tol = tf.resolve();
    const qdt::QDParams p = params_from_flags(pf, tol);
    const qdt::CriticalGraph g = qdt::build_graph(p, qdt::StepLimits{}, tol);
    const qdt::FigureWindow win = window_from_flags(p, wcenter, whalf);
    qdt::write_graph_svg(out + ".svg", g, win);
    qdt::write_graph_csv(out + ".csv", g);
    std::ofstream js(out + ".json", std::ios::binary);
    js << qdt::graph_to_json(g).dump(2) << "\n";
    std::printf("topology: %s, shorts: %zu, loops: %zu\n", qdt::topology_name(g.topology),
                g.shorts.size(), g.loops.size());
    for (const auto& w : g.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    std::printf("wrote %s.svg %s.csv %s.json\n", out.c_str(), out.c_str(), out.c_str());
    return 0;
}

int cmd_periods(const ParamFlags& pf, const TolFlags& tf, const std::string& arc_file, int traj_id) {
    const qdt::Tolerances tol = tf.resolve();
    const qdt::QDParams p = params_from_flags(pf, tol);
    auto polylines = qdt::read_polylines_csv(arc_file);
    if (polylines.empty()) throw std::runtime_error("no polylines in " + arc_file);
    const qdt::PathPolyline* arc = nullptr;
    if (traj_id >= 0) {
        auto it = polylines.find(traj_id);
        if (it == polylines.end())
            throw std::runtime_error("trajectory id " + std::to_string(traj_id) + " not in " + arc_file);
        arc = &it->second;
    } else {
        // default: the first short trajectory, else the only polyline
        for (auto& [id, poly] : polylines)
            if (id >= qdt::kShortIdBase && id < qdt::kLoopIdBase) {
                arc = &poly;
                traj_id = id;
                break;
            }
        if (!arc && polylines.size() == 1) {
            arc = &polylines.begin()->second;
            traj_id = polylines.begin()->first;
        }
        if (!arc)
            throw std::runtime_error("several polylines in " + arc_file + "; select one with --traj-id");
    }
    const qdt::PeriodReport rep = qdt::classify_arc(p, *arc, tol);
    std::printf("trajectory %d: %zu points\n", traj_id, arc->pts.size());
    std::printf("period: %s  (estimated error %s)\n", qdt::format_complex(rep.value).c_str(),
                qdt::format_double(rep.est_error).c_str());
    if (rep.matched)
        std::printf("class: %s with sign %+d, closed form %s\n", rep.matched_class.c_str(),
                    rep.matched_sign, qdt::format_complex(rep.class_value).c_str());
    else
        std::printf("class: unmatched (closest %s, diff %s)\n", rep.matched_class.c_str(),
                    qdt::format_double(std::abs(rep.value - double(rep.matched_sign) * rep.class_value))
                        .c_str());
    std::printf("winding vs reference arc: (%d, %d)\n", rep.winding_minus1, rep.winding_plus1);
    return rep.matched ? 0 : 1;
}

int cmd_jacobi(const ParamFlags& pf, const TolFlags& tf, int n, const std::string& out,
               const std::string& wcenter, double whalf) {
    const qdt::Tolerances tol = tf.resolve();
    const qdt::QDParams p = params_from_flags(pf, tol);
    if (!p.origin) throw CLI::ValidationError("the jacobi command needs the --A/--B parameter source");
    if (n == 0) {
        std::printf("degree 0: constant polynomial, empty root set, comparison skipped\n");
        return 0;
    }
    const qdt::CriticalGraph g = qdt::build_graph(p, qdt::StepLimits{}, tol);
    if (g.shorts.empty()) {
        std::fprintf(stderr, "no short trajectory; zero-distribution comparison is undefined\n");
        std::ofstream js(out + ".json", std::ios::binary);
        js << qdt::graph_to_json(g).dump(2) << "\n";
        return 1;
    }
    const qdt::PolySpec spec = qdt::build(n, double(n) * p.origin->A, double(n) * p.origin->B);
    const qdt::RootSet rs = qdt::roots(spec);
    const qdt::MeasureComparison mc = qdt::compare(p.origin->A, p.origin->B, n, g);
    qdt::write_roots_csv(out + "_roots.csv", rs);
    std::ofstream js(out + ".json", std::ios::binary);
    js << qdt::comparison_to_json(mc).dump(2) << "\n";
    const qdt::FigureWindow win = window_from_flags(p, wcenter, whalf);
    qdt::write_overlay_svg(out + ".svg", g, rs, win);
    std::printf("n=%d roots=%zu mean_dist=%s max_dist=%s mass=%s\n", n, rs.roots.size(),
                qdt::format_double(mc.mean_dist).c_str(), qdt::format_double(mc.max_dist).c_str(),
                qdt::format_double(std::abs(mc.mass_check)).c_str());
    std::printf("wrote %s_roots.csv %s.json %s.svg\n", out.c_str(), out.c_str(), out.c_str());
    return 0;
}

int cmd_verify(const TolFlags& tf, std::uint64_t seed) {
    const qdt::Tolerances tol = tf.resolve();
    auto results = qdt::verify::run_all(seed, tol, &std::cout);
    int failed = 0;
    std::printf("\n%-26s %-6s %-9s %s\n", "check", "result", "seconds", "detail");
    for (const auto& r : results) {
        if (!r.pass) ++failed;
        std::printf("%-26s %-6s %-9.2f %s\n", r.name.c_str(), r.pass ? "pass" : "FAIL", r.seconds,
                    r.detail.c_str());
    }
    std::printf("%d/%zu checks passed\n", int(results.size()) - failed, results.size());
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"critical graphs, periods and zero distributions of the quadratic differential "
                 "lambda^2 (z-a)(z-b)/(z^2-1)^2 dz^2"};
    app.require_subcommand(1);
    app.set_config("--config");

    ParamFlags pf_check, pf_graph, pf_periods, pf_jacobi;
    TolFlags tf_check, tf_graph, tf_periods, tf_jacobi, tf_verify;
    std::string out_graph = "graph", out_jacobi = "jacobi";
    std::string wcenter_graph, wcenter_jacobi;
    double whalf_graph = -1, whalf_jacobi = -1;
    std::string arc_file;
    int traj_id = -1, jacobi_n = 16;
    std::uint64_t seed = 20260809ULL;

    CLI::App* c_check = app.add_subcommand("check-p", "four period values and the short-trajectory criterion");
    add_param_flags(c_check, pf_check);
    add_tol_flags(c_check, tf_check);

    CLI::App* c_graph = app.add_subcommand("graph", "trace the critical graph and write svg/csv/json");
    add_param_flags(c_graph, pf_graph);
    add_tol_flags(c_graph, tf_graph);
    c_graph->add_option("--out", out_graph, "output prefix");
    c_graph->add_option("--window-center", wcenter_graph, "figure window center (complex literal)");
    c_graph->add_option("--window-half-width", whalf_graph, "figure window half width");

    CLI::App* c_periods = app.add_subcommand("periods", "integrate an arc from a polyline CSV and match its class");
    add_param_flags(c_periods, pf_periods);
    add_tol_flags(c_periods, tf_periods);
    c_periods->add_option("--arc", arc_file, "polyline CSV (header traj_id,s,re,im)")->required();
    c_periods->add_option("--traj-id", traj_id, "trajectory id inside the CSV");

    CLI::App* c_jacobi = app.add_subcommand("jacobi", "polynomial roots vs the short trajectory");
    add_param_flags(c_jacobi, pf_jacobi);
    add_tol_flags(c_jacobi, tf_jacobi);
    c_jacobi->add_option("--n", jacobi_n, "polynomial degree");
    c_jacobi->add_option("--out", out_jacobi, "output prefix");
    c_jacobi->add_option("--window-center", wcenter_jacobi, "figure window center");
    c_jacobi->add_option("--window-half-width", whalf_jacobi, "figure window half width");

    CLI::App* c_verify = app.add_subcommand("verify", "run the randomized identity and property suites");
    add_tol_flags(c_verify, tf_verify);
    c_verify->add_option("--seed", seed, "seed for the randomized suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (c_check->parsed()) return cmd_check_p(pf_check, tf_check);
        if (c_graph->parsed())
            return cmd_graph(pf_graph, tf_graph, out_graph, wcenter_graph, whalf_graph);
        if (c_periods->parsed()) return cmd_periods(pf_periods, tf_periods, arc_file, traj_id);
        if (c_jacobi->parsed())
            return cmd_jacobi(pf_jacobi, tf_jacobi, jacobi_n, out_jacobi, wcenter_jacobi, whalf_jacobi);
        if (c_verify->parsed()) return cmd_verify(tf_verify, seed);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
