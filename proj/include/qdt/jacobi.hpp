#pragma once

#include <complex>
#include <vector>

#include "qdt/qdiff.hpp"
#include "qdt/tracer.hpp"

namespace qdt {

/// A generalized Jacobi polynomial in the monomial basis. Coefficients are
/// accumulated in extended precision; `condition` estimates the cancellation
/// in that accumulation (max over coefficients of sum|terms|/|coefficient|).
struct PolySpec {
    int n = 0;
    cplx alpha, beta;
    std::vector<cplx> coeffs;                          // ascending powers, size n+1
    std::vector<std::complex<long double>> coeffs_ext; // working-precision copy
    int effective_degree = 0;
    bool degree_dropped = false;
    double condition = 1.0;

    cplx eval(cplx z) const;
    cplx eval_derivative(cplx z) const;
};

struct RootSet {
    std::vector<cplx> roots;
    double residual = 0.0;  // max |P(root)| / (sum_k |c_k| |root|^k)
    int iterations = 0;
    bool converged = false;
};

/// Expand 2^-n sum_k C(n+alpha, n-k) C(n+beta, k) (z-1)^k (z+1)^(n-k).
/// The generalized binomial is the falling-factorial form valid for complex
/// upper argument. Throws when cancellation exceeds working precision.
PolySpec build(int n, cplx alpha, cplx beta);

/// All roots of the effective-degree polynomial by simultaneous Aberth
/// iteration with Newton polishing. Throws on non-convergence.
RootSet roots(const PolySpec& spec);

/// Cauchy transform of the root-counting measure: (1/n) sum 1/(z - root).
cplx cauchy(const RootSet& rs, cplx z);

/// The same transform evaluated as P'(z)/(n P(z)) from the coefficients.
cplx cauchy_ratio(const PolySpec& spec, cplx z);

/// | (1-z^2) c^2 - ((A+B) z + A - B) c + A + B + 1 |.
double quadratic_residual(cplx A, cplx B, cplx z, cplx c);

/// Root cloud vs short trajectory: distance statistics, mass of the measure
/// carried by the short (target modulus 1), and far-field residual samples.
struct MeasureComparison {
    int n = 0;
    double mean_dist = 0.0, max_dist = 0.0;
    int outliers = 0;       // roots beyond 3 * mean_dist
    cplx mass_check;        // short period / (2 pi i)
    std::vector<double> cauchy_residuals;  // quadratic residual on a far ring
};

/// Compare the roots of build(n, n*A, n*B) against the short trajectories of
/// a graph built from from_jacobi(A, B). Throws when the graph has no short.
MeasureComparison compare(cplx A, cplx B, int n, const CriticalGraph& graph);

}  // namespace qdt
