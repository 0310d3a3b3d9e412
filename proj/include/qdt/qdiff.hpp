#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "qdt/geometry.hpp"

namespace qdt {

/// Numerical tolerances used across the library. Defaults are the working
/// values; override per call where a function accepts them.
struct Tolerances {
    double tol_root = 1e-10;      // relative, algebraic identities
    double tol_imag = 1e-9;       // realness of residues
    double tol_p = 1e-8;          // Property-P imaginary-part test
    double tol_coincide = 1e-12;  // parameter validation
    double tol_branch = 1e-11;    // square-root consistency
    double tol_traj = 1e-7;       // trajectory invariant, per unit scale
    double tol_period = 1e-7;     // period/class matching
};

struct JacobiOrigin {
    cplx A, B;
};

/// The triple (a, b, lambda) defining the differential
/// lambda^2 (z-a)(z-b) / (z^2-1)^2 dz^2, optionally recording the (A, B)
/// parametrization it was derived from.
struct QDParams {
    cplx a, b, lambda;
    std::optional<JacobiOrigin> origin;

    /// Max pairwise distance among {a, b, -1, 1}; the configuration scale
    /// used to make radii and tolerances dimensionless.
    double scale() const;

    cplx phi(cplx z) const { return lambda * lambda * (z - a) * (z - b); }
    cplx phi_prime(cplx z) const { return lambda * lambda * (2.0 * z - a - b); }
    /// Full coefficient Q(z) = phi(z)/(z^2-1)^2.
    cplx q(cplx z) const;
};

/// Coefficients of (z-p)^-2 in the local expansions at -1, +1 and (in the
/// 1/z chart) at infinity.
struct ResidueSet {
    cplx res_minus1, res_plus1, res_inf;
};

enum class PoleType { Circle, Radial, LogSpiral };

struct PoleTypes {
    PoleType at_minus1, at_plus1, at_inf;
};

const char* pole_type_name(PoleType t);

/// The four closed-form period values v(s1,s2) plus the vanishing-imaginary
/// verdict. Sign pairs are ordered (+,+), (+,-), (-,+), (-,-).
struct PropertyPReport {
    std::array<cplx, 4> values;
    std::array<double, 4> im_parts;
    std::array<std::pair<int, int>, 4> sign_pairs;
    bool satisfied = false;
    std::vector<int> satisfied_classes;         // indices into values
    std::array<std::string, 4> class_labels;    // labels when origin present, else sign pairs
    bool has_labels = false;
};

QDParams validate(cplx a, cplx b, cplx lambda, const Tolerances& tol = {});

/// Parameters from the (A, B) parametrization: a and b are the roots of
/// R_{A,B}, lambda = i(A+B+2).
QDParams from_jacobi(cplx A, cplx B, const Tolerances& tol = {});

/// R_{A,B}(z) = (A+B+2)^2 z^2 + 2(A^2-B^2) z + (A-B)^2 - 4(A+B+1).
cplx r_ab(cplx A, cplx B, cplx z);

/// The two roots of R_{A,B}, plus branch: zeta_plus carries +4*sqrt(...).
std::pair<cplx, cplx> r_ab_zeros(cplx A, cplx B);

ResidueSet residues(const QDParams& p, const Tolerances& tol = {});

PoleTypes classify_poles(const ResidueSet& r, const Tolerances& tol = {});
PoleType classify_pole(cplx residue, const Tolerances& tol = {});

PropertyPReport property_p(const QDParams& p, const Tolerances& tol = {});

}  // namespace qdt
