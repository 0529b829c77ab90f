#pragma once

// Inverse design: from prescribed gap intervals (a_1,b_1),...,(a_m,b_m) build
// a concrete 2D period cell whose limit model reproduces them exactly.
//
// The chamber/outer volume ratios rho_j = |B_j|/|B_0| solve the linear system
// 1 + sum_j rho_j a_j/(a_j - b_k) = 0, k = 1..m, with the closed-form solution
//
//   rho_j = (b_j - a_j)/a_j * prod_{i != j} (b_i - a_j)/(a_i - a_j) > 0.
//
// Shells F_j are axis-aligned rectangles of area tau_j = rho_j/(gamma^2 + sum rho)
// in a row, chambers B_j are gamma-homothets of F_j about their centers, and a
// vertical passage of length h_j = (1-gamma)/2 * height(F_j) connects the top
// of B_j to the top of F_j. Choosing eta_j = a_j h_j |B_j| (unit cross-section
// profile) makes alpha_j = a_j, and |B_j|/|B_0| = rho_j makes beta_j = b_j.

#include <vector>

#include "resgap/errors.hpp"
#include "resgap/limit_model.hpp"

namespace resgap {

// Prescribed gap endpoints, strictly interlaced:
// alphas[0] < betas[0] < alphas[1] < ... < alphas[m-1] < betas[m-1].
struct TargetGaps {
    std::vector<double> alphas;
    std::vector<double> betas;

    std::size_t size() const { return alphas.size(); }
    void validate() const;
};

// Intermediate design quantities; geometry-free part of the construction.
struct DesignSolution {
    std::vector<double> rhos;  // chamber/outer volume ratios
    std::vector<double> taus;  // shell areas
    std::vector<double> etas;  // passage width constants
    double gamma = 0.0;        // homothety ratio

    void validate() const;  // tau_j > 0, sum tau < 1, rho/tau consistency
};

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
    double cx() const { return 0.5 * (x0 + x1); }
    double cy() const { return 0.5 * (y0 + y1); }
    bool contains(double x, double y) const { return x > x0 && x < x1 && y > y0 && y < y1; }
};

// Vertical passage through the shell: the rectangle of height h centered at
// (zx, zy), of width eta * eps^2 at perforation scale eps. d is the half-width
// of the protected clearance strip around the passage axis.
struct Passage {
    double zx = 0.0, zy = 0.0;
    double h = 0.0;
    double eta = 0.0;
    double d = 0.0;
};

// Explicit period-cell geometry inside the unit square: shells F_j, chambers
// B_j, passages, and the outer area |B_0| = 1 - sum |F_j|.
struct CellGeometry2D {
    std::vector<Rect> rects_f;
    std::vector<Rect> rects_b;
    std::vector<Passage> passages;
    double b0_area = 0.0;

    std::size_t resonator_count() const { return rects_f.size(); }
    void validate() const;
    // Limit model read off the geometry: n = 2, |D_j| = 1, |B_j| = area(B_j).
    UnitCellModel to_unit_cell_model() const;
};

// Closed-form rho (product formula). Throws NonPositiveRho if a non-positive
// value appears, which signals an interlacing violation upstream.
std::vector<double> solve_rho_closed_form(const TargetGaps& targets);

// Dense solve of the defining linear system; the independent oracle for the
// closed form.
std::vector<double> solve_rho_linear_system(const TargetGaps& targets);

// tau_j = rho_j / (gamma^n + sum_i rho_i); requires 0 < gamma < 1.
std::vector<double> compute_taus(const std::vector<double>& rhos, double gamma, int n = 2);

// rhos, taus and etas for the given targets; etas as placed by
// synthesize_geometry with its default layout.
DesignSolution solve_design(const TargetGaps& targets, double gamma,
                            double layout_margin = 0.005);

// Emit the full 2D cell. Shells are squares of area tau_j when a row of
// squares fits; otherwise widths shrink (or grow, when passage clearance
// demands it) with areas preserved. Throws InfeasibleLayout when the row
// cannot be packed and GammaTooLarge when no width allocation leaves the
// passage clearance d_j > eta_j.
CellGeometry2D synthesize_geometry(const TargetGaps& targets, double gamma,
                                   double layout_margin = 0.005);

// Convert the geometry back to a limit model, recompute (alpha, beta), and
// require max relative deviation from the targets < 1e-9.
GapReport roundtrip_verify(const CellGeometry2D& geometry, const TargetGaps& targets);

}  // namespace resgap
