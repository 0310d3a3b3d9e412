#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qdt/qdiff.hpp"

namespace qdt::verify {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// Randomized identity and property suites. Each returns a CheckResult with a
// reproducible failure description (seed and parameters) on failure.
CheckResult check_algebraic_identities(int samples, std::uint64_t seed, const Tolerances& tol);
CheckResult check_property_p_symmetries(int samples, std::uint64_t seed, const Tolerances& tol);
CheckResult check_branch_monodromy(int samples, std::uint64_t seed, const Tolerances& tol);
CheckResult check_branch_step_stability(std::uint64_t seed, const Tolerances& tol);
CheckResult check_residue_theorem(int loops, std::uint64_t seed, double tol_abs, const Tolerances& tol);
CheckResult check_quadrature_convergence(const Tolerances& tol);
CheckResult check_arc_class_coverage(int arcs, std::uint64_t seed, double tol_abs, const Tolerances& tol);
CheckResult check_arc_antisymmetry(std::uint64_t seed, const Tolerances& tol);
CheckResult check_trajectory_invariant(const Tolerances& tol);
CheckResult check_step_halving(const Tolerances& tol);
CheckResult check_fate_residue_consistency(const Tolerances& tol);
CheckResult check_existence_equivalence(int samples, std::uint64_t seed, const Tolerances& tol,
                                        std::ostream* progress = nullptr);
CheckResult check_homotopy_distinctness(const Tolerances& tol);
CheckResult check_jacobi_dual_formula(int samples, std::uint64_t seed, const Tolerances& tol);
CheckResult check_jacobi_rodrigues(const Tolerances& tol);
CheckResult check_jacobi_root_residuals(std::uint64_t seed, const Tolerances& tol);
CheckResult check_jacobi_far_field(std::uint64_t seed, const Tolerances& tol);
CheckResult check_teich_instances();

/// The full battery with default sizes. Progress lines go to `progress` when
/// non-null; returns one result per check.
std::vector<CheckResult> run_all(std::uint64_t seed, const Tolerances& tol, std::ostream* progress);

}  // namespace qdt::verify
