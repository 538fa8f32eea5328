#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wssopt/estimation.hpp"

namespace wssopt {

/// Diagnostics comparing a problem's Toeplitz covariance R with its circulant
/// counterpart C, and the two error covariances M (from R) and L (from C),
/// under the strong (spectral) and weak (normalized Frobenius) norms.
struct EquivalenceReport {
    int n = 0;
    double strong_r = 0.0;       // ||R||
    double strong_c = 0.0;       // ||C||
    double strong_r_inv = 0.0;   // ||R^-1||
    double strong_c_inv = 0.0;   // ||C^-1||
    double strong_m = 0.0;       // ||M||
    double strong_l = 0.0;       // ||L||
    double weak_gap_cr = 0.0;    // |C - R|
    double weak_gap_inv = 0.0;   // |C^-1 - R^-1|
    double weak_gap_lm = 0.0;    // |L - M|
    double trace_gap = 0.0;      // |trace(L - M)| / n
};

/// Builds the report and verifies the finite-n inequalities that hold exactly
/// in algebra, to absolute slack 1e-9 (relative to the right-hand side):
///   |C^-1 - R^-1| <= ||C^-1|| * ||R^-1|| * |C - R|
///   |L - M|       <= ||L|| * ||M|| * ||C^-1|| * ||R^-1|| * |C - R|
///   |trace(L - M)| / n <= |L - M|
/// Violations throw DiagnosticError.
EquivalenceReport equivalence_report(const EstimationProblem& problem,
                                     const PowerAllocation& alloc);

struct NormBoundednessRow {
    int n = 0;
    double strong_r = 0.0;
    double strong_c = 0.0;
    double min_eig_r = 0.0;
    double min_eig_c = 0.0;
};

struct NormBoundednessTable {
    std::vector<NormBoundednessRow> rows;  // ascending n
    /// True when the strong norm of R or C is still growing by more than 1%
    /// per step across the three largest n — a hint that the family's spectral
    /// mass is unbounded (or the window is far too short).
    bool growth_flag = false;
};

/// Tabulates ||R||, ||C|| and the smallest eigenvalues over window sizes.
NormBoundednessTable norm_boundedness_probe(const AcfModel& acf, double rate_hz,
                                            std::vector<int> n_list);

struct CyclicSymmetryResult {
    int trials = 0;
    double max_rel_dev_equiv = 0.0;   // over all rotations, circulant objective
    double max_rel_dev_direct = 0.0;  // same for the Toeplitz objective
    bool passed = false;              // equiv deviation <= 1e-12
};

/// Checks that the circulant-objective value is invariant under every cyclic
/// rotation of the allocation (to 1e-12 relative) and records how strongly the
/// Toeplitz objective breaks that symmetry. Runs on the given allocation plus
/// trials-1 random feasible ones drawn from `seed`.
CyclicSymmetryResult cyclic_symmetry_probe(const EstimationProblem& problem,
                                           const PowerAllocation& alloc, int trials,
                                           std::uint64_t seed);

struct ProbeResult {
    std::string name;
    int trials = 0;
    double deviation = 0.0;  // probe-specific; passed iff deviation <= threshold
    double threshold = 0.0;
    bool passed = false;
};

struct LemmaProbeConfig {
    EstimationProblem problem;
    int trials = 100;
    std::uint64_t seed = 12345;
    /// Fault-injection hook: the analytic gradient is multiplied by this
    /// before the finite-difference comparison. Anything but 1.0 must trip
    /// the gradient probe.
    double gradient_scale = 1.0;
};

/// Randomized checks of the structural facts the optimizer and the circulant
/// analysis rest on: strict convexity (midpoint and line-restriction forms),
/// cyclic symmetry of the circulant objective, the weak-norm inequalities,
/// and the analytic gradient against central finite differences.
std::vector<ProbeResult> run_lemma_probes(const LemmaProbeConfig& config);

/// Random feasible allocation, drawn uniformly and projected onto the
/// constraint set; stays comfortably away from the power floor.
Eigen::VectorXd random_allocation(const EstimationProblem& problem, std::uint64_t seed);

}  // namespace wssopt
