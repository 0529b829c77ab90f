#pragma once

// Floquet-Bloch band computation on the rasterized period cell. The operator
// is the 5-point finite-difference discretization of -eps^-2 * Laplacian on
// the fluid cells; walls act as Neumann boundaries (missing fluxes), and the
// outer square carries quasi-periodic, Neumann, or Dirichlet conditions.
//
// For every quasi-momentum theta and band index k the discrete operators
// satisfy the same min-max bracketing as the continuum ones,
// lambda_k(Neumann) <= lambda_k(theta) <= lambda_k(Dirichlet); the sweep
// verifies this on every computed pair.

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "resgap/eigensolver.hpp"
#include "resgap/inverse_design.hpp"
#include "resgap/raster.hpp"

namespace resgap {

struct BoundaryCondition {
    enum class Kind { quasi, neumann_outer, dirichlet_outer };

    Kind kind = Kind::neumann_outer;
    double theta_x = 0.0;
    double theta_y = 0.0;

    static BoundaryCondition quasi(double tx, double ty);
    static BoundaryCondition neumann() { return {Kind::neumann_outer, 0.0, 0.0}; }
    static BoundaryCondition dirichlet() { return {Kind::dirichlet_outer, 0.0, 0.0}; }

    // True when both phase factors are +-1, so the operator stays real.
    bool phases_real() const;
    std::string label() const;
};

struct SpectrumSlice {
    BoundaryCondition bc;
    std::vector<double> eigenvalues;  // ascending
    std::vector<double> residuals;
};

struct Band {
    double lo = 0.0;
    double hi = 0.0;
};

struct GapInterval {
    int k = 0;  // 1-based index of the band below the gap
    double lo = 0.0;
    double hi = 0.0;
};

struct BandSweep {
    std::vector<std::array<double, 2>> theta_samples;
    std::vector<SpectrumSlice> slices;  // one per theta sample
    SpectrumSlice neumann;
    SpectrumSlice dirichlet;
    std::vector<Band> bands;        // band k = [min_theta lambda_k, max_theta lambda_k]
    std::vector<GapInterval> gaps;  // open intervals between bands, below the cutoff
    double cutoff = std::numeric_limits<double>::infinity();
    double bracket_worst = 0.0;  // most positive bracketing violation seen (<= 0 is clean)
};

// Per-axis quasi-momentum samples: theta_i = pi * i / (g - 1), i = 0..g-1.
// Includes 0 and pi for every g >= 2; values theta and 2*pi - theta share the
// same spectrum (complex conjugation), so [0, pi] suffices for extrema.
std::vector<double> theta_axis(int theta_grid);

SparseOperator assemble(const RasterCell& cell, const BoundaryCondition& bc);

SpectrumSlice solve_slice(const RasterCell& cell, const BoundaryCondition& bc, int k_max,
                          const EigenOptions& opts = {});

// Full sweep: theta_grid x theta_grid quasi slices plus the Neumann and
// Dirichlet brackets. Throws BracketingViolation if the min-max enclosure is
// violated beyond 1e-6 relative slack anywhere. Gaps entirely above `cutoff`
// are not reported.
BandSweep sweep_bands(const RasterCell& cell, int theta_grid, int k_max,
                      double cutoff = std::numeric_limits<double>::infinity(),
                      const EigenOptions& opts = {});

// Sampled cutoff constant: the outer region B_0 is rasterized alone (Neumann
// on the shell boundaries) and the smallest quasi-periodic eigenvalue is
// maximized over the theta grid. Scale-free; the spectral cutoff at
// perforation scale eps is the returned value divided by eps^2.
double estimate_lambda(const CellGeometry2D& geometry, int theta_grid, int grid_n,
                       const EigenOptions& opts = {});

struct StudyRow {
    double epsilon = 0.0;
    int grid_n = 0;
    std::vector<double> lambda_neumann;    // k = 1..m+1
    std::vector<double> lambda_dirichlet;  // k = 1..m
    std::vector<GapInterval> gaps;
    int gap_count = 0;
    double cutoff = 0.0;
    // Relative deviations from the limit model (NaN when a gap is missing).
    std::vector<double> dev_gap_lo;     // vs alpha_j
    std::vector<double> dev_gap_hi;     // vs beta_j
    std::vector<double> dev_dirichlet;  // lambda_k(D) vs alpha_k
    std::vector<double> dev_neumann;    // lambda_{k+1}(N) vs beta_k
};

struct StudyTable {
    std::vector<double> limit_alphas;
    std::vector<double> limit_betas;
    double lambda_hat = 0.0;
    std::vector<StudyRow> rows;  // one per epsilon, descending epsilon
    std::vector<std::string> trend_violations;  // empty when deviations shrink
};

// Epsilon-refinement study for a designed geometry: for each epsilon in the
// descending list, pick the smallest grid (capped by grid_n_cap) that resolves
// every passage with >= 3 cells, sweep the bands, and compare gap endpoints
// and the Neumann/Dirichlet eigenvalues against the limit model. Deviations
// are required to be nonincreasing along the list; violations are recorded,
// not thrown.
StudyTable convergence_study(const TargetGaps& targets, double gamma,
                             const std::vector<double>& eps_list, int grid_n_cap,
                             int theta_grid = 3, const EigenOptions& opts = {});

}  // namespace resgap
