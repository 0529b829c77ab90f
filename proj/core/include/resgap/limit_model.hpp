#pragma once

// Vanishing-perforation limit of the Neumann Laplacian on resonator-perforated
// space. Each resonator family j contributes a Helmholtz-resonator rate
//
//     alpha_j = eta_j^(n-1) |D_j| / (h_j |B_j|),
//
// and the first m spectral gaps of the perforated operator converge to the
// intervals (alpha_j, beta_j), where beta_1 < ... < beta_m are the zeros of
//
//     F(lambda) = 1 + sum_j alpha_j |B_j| / (|B_0| (alpha_j - lambda)).
//
// F is strictly increasing between consecutive poles, so the zeros interlace:
// alpha_1 < beta_1 < alpha_2 < ... < alpha_m < beta_m.
//
// Two finite-dimensional oracles cross-check the root computation: the
// (m+1)x(m+1) chamber-coupling matrix (weighted-symmetric, spectrum
// {0, beta_1, ..., beta_m}) and the diagonal matrix diag(alpha_1,...,alpha_m).

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "resgap/errors.hpp"

namespace resgap {

// Scalar parameters of one resonator family.
struct ResonatorSpec {
    double h = 0.0;                  // passage length along the distinguished axis
    double eta = 0.0;                // cross-section scale constant
    double d_profile_measure = 0.0;  // (n-1)-volume |D| of the cross-section profile
    double b_volume = 0.0;           // n-volume |B| of the inner chamber

    void validate() const;  // all four strictly positive
    double alpha(int n) const;
};

// Relative tolerance below which two alpha values are treated as coinciding
// (the pole brackets degenerate numerically past this point).
inline constexpr double kDuplicateAlphaRelTol = 1e-12;

// Period-cell data in the limit model. Validates on construction: m >= 1,
// n >= 2, positive volumes, pairwise distinct alphas. Resonators are kept in
// input order; the alpha-sorting permutation is recorded.
class UnitCellModel {
public:
    UnitCellModel(int n, std::vector<ResonatorSpec> resonators, double b0_volume);

    int dimension() const { return n_; }
    std::size_t resonator_count() const { return resonators_.size(); }
    const std::vector<ResonatorSpec>& resonators() const { return resonators_; }
    double b0_volume() const { return b0_volume_; }

    // Ascending alphas and the permutation that produced them:
    // alphas_sorted()[i] belongs to resonators()[sort_permutation()[i]].
    const std::vector<double>& alphas_sorted() const { return alphas_sorted_; }
    const std::vector<std::size_t>& sort_permutation() const { return perm_; }
    std::vector<double> b_volumes_sorted() const;

private:
    int n_;
    std::vector<ResonatorSpec> resonators_;
    double b0_volume_;
    std::vector<double> alphas_sorted_;
    std::vector<std::size_t> perm_;
};

// Limiting gap intervals (alpha_j, beta_j), both lists ascending and
// interlaced. lambda_cap, when present, is the sampled cutoff estimate from
// the band solver.
struct GapReport {
    std::vector<double> alphas;
    std::vector<double> betas;
    std::optional<double> lambda_cap;

    void validate() const;  // interlacing
};

// Dense square matrix that is self-adjoint with respect to the weighted inner
// product <u,v> = sum_i w_i u_i conj(v_i).
struct WeightedMatrix {
    Eigen::MatrixXd entries;
    std::vector<double> weights;

    int dim() const { return static_cast<int>(entries.rows()); }
    // max_ij |(W A)_ij - (A^T W)_ij|, relative to the matrix scale; zero up to
    // rounding for matrices built by neumann_limit_matrix.
    double weighted_symmetry_defect() const;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// alpha_j for each resonator, in input order (callers sort as needed).
std::vector<double> compute_alphas(const UnitCellModel& model);

// F(lambda); throws PoleEvaluation if lambda collides with a pole.
double gap_function(const UnitCellModel& model, double lambda);

// F'(lambda) = sum_j alpha_j |B_j| / (|B_0| (alpha_j - lambda)^2) > 0.
double gap_function_derivative(const UnitCellModel& model, double lambda);

// All m zeros of F, bracketed between consecutive poles (the last one in
// (alpha_m, alpha_m + S + 1], S = sum alpha_j |B_j| / |B_0|). Bisection to
// width 1e-13 * bracket, then up to 5 Newton polish steps.
GapReport compute_betas(const UnitCellModel& model);

// The (m+1)x(m+1) chamber-coupling matrix with weights (|B_0|,|B_1|,...,|B_m|)
// in alpha-sorted order. Row 0: diagonal sum_j alpha_j|B_j|/|B_0|, off-diagonal
// -alpha_j|B_j|/|B_0|; row j>=1: -alpha_j in column 0, alpha_j on the diagonal.
WeightedMatrix neumann_limit_matrix(const UnitCellModel& model);

// Eigenvalues of the weighted matrix, ascending, computed on the symmetrized
// form W^(1/2) A W^(-1/2). The smallest is 0 within 1e-10 absolute; the rest
// equal the betas.
std::vector<double> neumann_limit_eigenvalues(const WeightedMatrix& matrix);

// Ascending (alpha_1, ..., alpha_m): the Dirichlet-limit spectrum.
std::vector<double> dirichlet_limit_eigenvalues(const UnitCellModel& model);

// The 2m Maxwell frequency gaps (sqrt(alpha_j), sqrt(beta_j)) and
// (-sqrt(beta_j), -sqrt(alpha_j)), sorted ascending by lower endpoint.
std::vector<Interval> maxwell_gaps(const GapReport& report);

namespace detail {

// Bisection down to width_rel_tol * (hi - lo) followed by Newton polish kept
// inside the bracket. Requires f(lo) < 0 < f(hi); throws RootNotBracketed
// otherwise.
double find_bracketed_root(const std::function<double(double)>& f,
                           const std::function<double(double)>& df, double lo, double hi,
                           double width_rel_tol = 1e-13, int newton_steps = 5);

}  // namespace detail

}  // namespace resgap
