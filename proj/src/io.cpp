#include "qdt/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qdt {

namespace {

bool parse_double(std::string_view s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace

bool parse_complex(std::string_view text, cplx& out) {
    if (text.empty()) return false;
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' '; }), s.end());
    if (s.empty()) return false;

    const bool imag_tail = s.back() == 'i' || s.back() == 'I';
    if (!imag_tail) {
        double re;
        if (!parse_double(s, re)) return false;
        out = cplx(re, 0.0);
        return true;
    }
    s.pop_back();  // strip i
    // split at the last +/- that is not an exponent sign and not leading
    std::size_t split = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    if (split == std::string::npos) {
        // pure imaginary: "IMi", "i", "-i", "+i"
        double im;
        if (s.empty() || s == "+")
            im = 1.0;
        else if (s == "-")
            im = -1.0;
        else if (!parse_double(s, im))
            return false;
        out = cplx(0.0, im);
        return true;
    }
    double re, im;
    if (!parse_double(s.substr(0, split), re)) return false;
    std::string imtext = s.substr(split);
    if (imtext == "+")
        im = 1.0;
    else if (imtext == "-")
        im = -1.0;
    else if (!parse_double(imtext, im))
        return false;
    out = cplx(re, im);
    return true;
}

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

std::string format_complex(cplx z) {
    if (z.imag() == 0.0) return format_double(z.real());
    std::string s = format_double(z.real());
    if (z.imag() >= 0.0 || std::isnan(z.imag())) s += "+";
    s += format_double(z.imag());
    s += "i";
    return s;
}

FigureWindow default_window(const QDParams& p) {
    const cplx pts[4] = {p.a, p.b, cplx(-1.0, 0.0), cplx(1.0, 0.0)};
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (cplx z : pts) {
        xmin = std::min(xmin, z.real());
        xmax = std::max(xmax, z.real());
        ymin = std::min(ymin, z.imag());
        ymax = std::max(ymax, z.imag());
    }
    FigureWindow w;
    w.center = cplx(0.5 * (xmin + xmax), 0.5 * (ymin + ymax));
    w.half_width = 0.72 * std::max(xmax - xmin, ymax - ymin) + 0.6;
    return w;
}

namespace {

struct SvgCanvas {
    std::ostringstream os;
    double cx, cy, half;
    int size;

    SvgCanvas(const FigureWindow& win, int px) : cx(win.center.real()), cy(win.center.imag()), half(win.half_width), size(px) {
        os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
           << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
        os << "<rect x=\"0\" y=\"0\" width=\"" << size << "\" height=\"" << size
           << "\" fill=\"white\"/>\n";
    }

    double px(double x) const { return (x - (cx - half)) / (2.0 * half) * size; }
    double py(double y) const { return size - (y - (cy - half)) / (2.0 * half) * size; }

    static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", v);
        return buf;
    }

    bool inside(cplx z) const {
        return std::abs(z.real() - cx) < 1.6 * half && std::abs(z.imag() - cy) < 1.6 * half;
    }

    void path(const PathPolyline& poly, const char* cls, const char* stroke, double width,
              const char* dash = nullptr) {
        const std::size_t stride = 1 + poly.pts.size() / 4000;
        os << "<path class=\"" << cls << "\" fill=\"none\" stroke=\"" << stroke
           << "\" stroke-width=\"" << width << "\"";
        if (dash) os << " stroke-dasharray=\"" << dash << "\"";
        os << " d=\"";
        bool pen_down = false;
        auto emit = [&](cplx z) {
            if (!inside(z)) {
                pen_down = false;
                return;
            }
            os << (pen_down ? "L" : "M") << fmt(px(z.real())) << " " << fmt(py(z.imag()));
            pen_down = true;
        };
        for (std::size_t i = 0; i < poly.pts.size(); i += stride) emit(poly.pts[i]);
        if (!poly.pts.empty()) emit(poly.pts.back());
        os << "\"/>\n";
    }

    void dot(cplx z, double r, const char* fill) {
        os << "<circle cx=\"" << fmt(px(z.real())) << "\" cy=\"" << fmt(py(z.imag())) << "\" r=\"" << r
           << "\" fill=\"" << fill << "\"/>\n";
    }

    void cross(cplx z, double r) {
        const double x = px(z.real()), y = py(z.imag());
        os << "<path fill=\"none\" stroke=\"black\" stroke-width=\"1.6\" d=\"M" << fmt(x - r) << " "
           << fmt(y - r) << "L" << fmt(x + r) << " " << fmt(y + r) << "M" << fmt(x - r) << " "
           << fmt(y + r) << "L" << fmt(x + r) << " " << fmt(y - r) << "\"/>\n";
    }

    std::string finish() {
        os << "</svg>\n";
        return os.str();
    }
};

void draw_graph(SvgCanvas& canvas, const CriticalGraph& g) {
    for (const auto& loop : g.loops) canvas.path(loop.path, "loop", "#1f77b4", 1.1);
    for (const auto& t : g.trajectories) canvas.path(t.polyline, "traj", "#777777", 1.2);
    for (const auto& st : g.shorts) canvas.path(st.path, "short", "#d62728", 2.2);
    canvas.cross(cplx(-1.0, 0.0), 5.0);
    canvas.cross(cplx(1.0, 0.0), 5.0);
    canvas.dot(g.params.a, 4.0, "black");
    canvas.dot(g.params.b, 4.0, "black");
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}

nlohmann::ordered_json json_complex(cplx z) {
    return nlohmann::ordered_json{{"re", z.real()}, {"im", z.imag()}};
}

}  // namespace

void write_graph_svg(const std::string& path, const CriticalGraph& g, const FigureWindow& win) {
    SvgCanvas canvas(win, 900);
    draw_graph(canvas, g);
    write_file(path, canvas.finish());
}

void write_overlay_svg(const std::string& path, const CriticalGraph& g, const RootSet& rs,
                       const FigureWindow& win) {
    SvgCanvas canvas(win, 900);
    draw_graph(canvas, g);
    for (cplx r : rs.roots) canvas.dot(r, 2.2, "#ff7f0e");
    write_file(path, canvas.finish());
}

namespace {

void csv_polyline(std::ostringstream& os, int id, const PathPolyline& poly) {
    for (std::size_t i = 0; i < poly.pts.size(); ++i) {
        os << id << "," << format_double(poly.cum[i]) << "," << format_double(poly.pts[i].real())
           << "," << format_double(poly.pts[i].imag()) << "\n";
    }
}

}  // namespace

void write_graph_csv(const std::string& path, const CriticalGraph& g) {
    std::ostringstream os;
    os << "traj_id,s,re,im\n";
    for (std::size_t i = 0; i < g.trajectories.size(); ++i)
        csv_polyline(os, int(i), g.trajectories[i].polyline);
    for (std::size_t i = 0; i < g.shorts.size(); ++i)
        csv_polyline(os, kShortIdBase + int(i), g.shorts[i].path);
    for (std::size_t i = 0; i < g.loops.size(); ++i)
        csv_polyline(os, kLoopIdBase + int(i), g.loops[i].path);
    write_file(path, os.str());
}

std::map<int, PathPolyline> read_polylines_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path);
    // tolerate trailing \r
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "traj_id,s,re,im") throw std::runtime_error("unexpected CSV header: " + line);
    std::map<int, PathPolyline> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::array<std::string, 4> fields;
        std::size_t start = 0;
        for (int f = 0; f < 4; ++f) {
            const std::size_t comma = line.find(',', start);
            if (f < 3 && comma == std::string::npos)
                throw std::runtime_error("bad CSV row at line " + std::to_string(lineno));
            fields[f] = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            start = comma + 1;
        }
        double id_d, re, im;
        if (!parse_double(fields[0], id_d) || !parse_double(fields[2], re) || !parse_double(fields[3], im))
            throw std::runtime_error("bad CSV row at line " + std::to_string(lineno));
        out[int(id_d)].pts.emplace_back(re, im);
    }
    for (auto& [id, poly] : out) poly.rebuild_cumlen();
    return out;
}

void write_roots_csv(const std::string& path, const RootSet& rs) {
    std::ostringstream os;
    os << "idx,re,im\n";
    for (std::size_t i = 0; i < rs.roots.size(); ++i)
        os << i << "," << format_double(rs.roots[i].real()) << "," << format_double(rs.roots[i].imag())
           << "\n";
    write_file(path, os.str());
}

nlohmann::ordered_json graph_to_json(const CriticalGraph& g) {
    nlohmann::ordered_json j;
    j["params"]["a"] = json_complex(g.params.a);
    j["params"]["b"] = json_complex(g.params.b);
    j["params"]["lambda"] = json_complex(g.params.lambda);
    if (g.params.origin) {
        j["params"]["A"] = json_complex(g.params.origin->A);
        j["params"]["B"] = json_complex(g.params.origin->B);
    }
    j["residues"]["minus1"] = json_complex(g.res.res_minus1);
    j["residues"]["plus1"] = json_complex(g.res.res_plus1);
    j["residues"]["inf"] = json_complex(g.res.res_inf);
    j["pole_types"]["minus1"] = pole_type_name(g.pole_types.at_minus1);
    j["pole_types"]["plus1"] = pole_type_name(g.pole_types.at_plus1);
    j["pole_types"]["inf"] = pole_type_name(g.pole_types.at_inf);

    auto& pp = j["property_p"];
    pp["values"] = nlohmann::ordered_json::array();
    for (int k = 0; k < 4; ++k) {
        nlohmann::ordered_json v;
        v["sign_pair"] = {g.prop_p.sign_pairs[k].first, g.prop_p.sign_pairs[k].second};
        v["value"] = json_complex(g.prop_p.values[k]);
        v["im"] = g.prop_p.im_parts[k];
        v["class"] = g.prop_p.class_labels[k];
        pp["values"].push_back(v);
    }
    pp["satisfied"] = g.prop_p.satisfied;
    pp["classes"] = nlohmann::ordered_json::array();
    for (int idx : g.prop_p.satisfied_classes) pp["classes"].push_back(g.prop_p.class_labels[idx]);

    j["trajectories"] = nlohmann::ordered_json::array();
    for (const auto& t : g.trajectories) {
        nlohmann::ordered_json tj;
        tj["origin"] = t.zero_id == 0 ? "a" : (t.zero_id == 1 ? "b" : "regular");
        tj["angle_index"] = t.angle_index;
        tj["fate"] = fate_name(t.fate);
        tj["arclength"] = t.arclength;
        tj["terminal_gap"] = t.terminal_gap;
        tj["im_defect"] = t.im_defect;
        if (!t.note.empty()) tj["note"] = t.note;
        j["trajectories"].push_back(tj);
    }

    j["shorts"] = nlohmann::ordered_json::array();
    for (const auto& st : g.shorts) {
        nlohmann::ordered_json sj;
        sj["period"] = json_complex(st.period.value);
        sj["period_error"] = st.period.est_error;
        sj["class"] = st.period.matched_class;
        sj["n_points"] = st.path.pts.size();
        sj["endpoint_gap"] = st.endpoint_gap;
        sj["winding"] = {st.period.winding_minus1, st.period.winding_plus1};
        j["shorts"].push_back(sj);
    }

    j["loops"] = nlohmann::ordered_json::array();
    for (const auto& l : g.loops) {
        j["loops"].push_back(nlohmann::ordered_json{{"pole", l.pole}, {"n_points", l.path.pts.size()}});
    }

    j["topology"] = topology_name(g.topology);
    j["consistent"] = g.consistent;
    j["warnings"] = g.warnings;
    return j;
}

nlohmann::ordered_json comparison_to_json(const MeasureComparison& mc) {
    nlohmann::ordered_json j;
    j["n"] = mc.n;
    j["mean_dist"] = mc.mean_dist;
    j["max_dist"] = mc.max_dist;
    j["outliers"] = mc.outliers;
    j["mass_check"] = json_complex(mc.mass_check);
    j["mass_modulus"] = std::abs(mc.mass_check);
    j["cauchy_residuals"] = mc.cauchy_residuals;
    return j;
}

}  // namespace qdt
