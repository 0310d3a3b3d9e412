#include "qdt/qdiff.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qdt {

namespace {
constexpr cplx kI{0.0, 1.0};

double rel(cplx x, cplx ref) { return std::abs(x) / (1.0 + std::abs(ref)); }
}  // namespace

double QDParams::scale() const {
    const cplx pts[4] = {a, b, cplx(-1.0, 0.0), cplx(1.0, 0.0)};
    double m = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) m = std::max(m, std::abs(pts[i] - pts[j]));
    return m;
}

cplx QDParams::q(cplx z) const {
    const cplx d = z * z - 1.0;
    return phi(z) / (d * d);
}

const char* pole_type_name(PoleType t) {
    switch (t) {
        case PoleType::Circle: return "circle";
        case PoleType::Radial: return "radial";
        case PoleType::LogSpiral: return "log-spiral";
    }
    return "?";
}

QDParams validate(cplx a, cplx b, cplx lambda, const Tolerances& tol) {
    const double unit = 1.0 + std::max(std::abs(a), std::abs(b));
    if (std::abs(a - b) <= tol.tol_coincide * unit)
        throw std::invalid_argument("invalid parameters: coincident zeros (a = b)");
    for (cplx z : {a, b}) {
        if (std::abs(z - 1.0) <= tol.tol_coincide * unit || std::abs(z + 1.0) <= tol.tol_coincide * unit)
            throw std::invalid_argument("invalid parameters: a zero coincides with a pole (-1 or 1)");
    }
    if (std::abs(lambda) <= tol.tol_coincide)
        throw std::invalid_argument("invalid parameters: lambda is zero");
    return QDParams{a, b, lambda, std::nullopt};
}

cplx r_ab(cplx A, cplx B, cplx z) {
    const cplx s = A + B + 2.0;
    return s * s * z * z + 2.0 * (A * A - B * B) * z + (A - B) * (A - B) - 4.0 * (A + B + 1.0);
}

std::pair<cplx, cplx> r_ab_zeros(cplx A, cplx B) {
    const cplx s = A + B + 2.0;
    const cplx disc = std::sqrt((A + 1.0) * (B + 1.0) * (A + B + 1.0));
    const cplx zp = (-A * A + B * B + 4.0 * disc) / (s * s);
    const cplx zm = (-A * A + B * B - 4.0 * disc) / (s * s);
    return {zp, zm};
}

QDParams from_jacobi(cplx A, cplx B, const Tolerances& tol) {
    const double unit = 1.0 + std::max(std::abs(A), std::abs(B));
    if (std::abs(A + B + 1.0) <= tol.tol_coincide * unit)
        throw std::invalid_argument("degenerate parameters: A+B+1 = 0");
    if (std::abs(A + B + 2.0) <= tol.tol_coincide * unit)
        throw std::invalid_argument("degenerate parameters: A+B+2 = 0");
    auto [zp, zm] = r_ab_zeros(A, B);
    QDParams p = validate(zp, zm, kI * (A + B + 2.0), tol);
    // the quadratic must vanish at both computed roots
    const double coeff_scale = std::abs((A + B + 2.0) * (A + B + 2.0)) * (1.0 + std::norm(zp) + std::norm(zm)) + 1.0;
    if (std::abs(r_ab(A, B, zp)) > 1e3 * tol.tol_root * coeff_scale ||
        std::abs(r_ab(A, B, zm)) > 1e3 * tol.tol_root * coeff_scale)
        throw std::runtime_error("from_jacobi: computed roots do not annihilate the quadratic");
    p.origin = JacobiOrigin{A, B};
    return p;
}

ResidueSet residues(const QDParams& p, const Tolerances&) {
    const cplx l2 = p.lambda * p.lambda;
    return ResidueSet{
        l2 * (1.0 + p.a) * (1.0 + p.b) / 4.0,
        l2 * (1.0 - p.a) * (1.0 - p.b) / 4.0,
        l2,
    };
}

PoleType classify_pole(cplx residue, const Tolerances& tol) {
    if (std::abs(residue) <= tol.tol_coincide)
        throw std::invalid_argument("classify_pole: residue vanishes, inconsistent with simple zeros");
    if (std::abs(residue.imag()) <= tol.tol_imag * (1.0 + std::abs(residue)))
        return residue.real() < 0.0 ? PoleType::Circle : PoleType::Radial;
    return PoleType::LogSpiral;
}

PoleTypes classify_poles(const ResidueSet& r, const Tolerances& tol) {
    return PoleTypes{classify_pole(r.res_minus1, tol), classify_pole(r.res_plus1, tol),
                     classify_pole(r.res_inf, tol)};
}

PropertyPReport property_p(const QDParams& p, const Tolerances& tol) {
    const cplx sx = std::sqrt((1.0 - p.a) * (1.0 - p.b));
    const cplx sy = std::sqrt((1.0 + p.a) * (1.0 + p.b));
    const cplx pref = kI * std::numbers::pi * p.lambda / 2.0;

    PropertyPReport rep;
    rep.sign_pairs = {{{+1, +1}, {+1, -1}, {-1, +1}, {-1, -1}}};
    for (int k = 0; k < 4; ++k) {
        auto [s1, s2] = rep.sign_pairs[k];
        rep.values[k] = pref * (double(s1) * sx + double(s2) * sy - 2.0);
        rep.im_parts[k] = rep.values[k].imag();
        if (std::abs(rep.im_parts[k]) <= tol.tol_p * (1.0 + std::abs(rep.values[k])))
            rep.satisfied_classes.push_back(k);
        rep.class_labels[k] = std::string("(") + (s1 > 0 ? "+" : "-") + "," + (s2 > 0 ? "+" : "-") + ")";
    }
    rep.satisfied = !rep.satisfied_classes.empty();

    if (p.origin) {
        const cplx A = p.origin->A, B = p.origin->B;
        const cplx s = A + B + 2.0;
        // sx = rho1 * 2A/(A+B+2) and sy = rho2 * 2B/(A+B+2); the effective
        // signs (s1*rho1, s2*rho2) select the class label.
        const int rho1 = (sx * s / (2.0 * A)).real() >= 0.0 ? +1 : -1;
        const int rho2 = (sy * s / (2.0 * B)).real() >= 0.0 ? +1 : -1;
        const cplx named[4] = {cplx(1.0), A + 1.0, B + 1.0, A + B + 1.0};
        const char* names[4] = {"1", "A+1", "B+1", "A+B+1"};
        const double two_pi = 2.0 * std::numbers::pi;
        for (int k = 0; k < 4; ++k) {
            auto [s1, s2] = rep.sign_pairs[k];
            const int e1 = s1 * rho1, e2 = s2 * rho2;
            const int j = (e1 > 0) ? (e2 > 0 ? 0 : 2) : (e2 > 0 ? 1 : 3);
            if (rel(rep.values[k] - two_pi * named[j], rep.values[k]) <= 1e3 * tol.tol_root)
                rep.class_labels[k] = names[j];
        }
        rep.has_labels = true;
    }
    return rep;
}

}  // namespace qdt
