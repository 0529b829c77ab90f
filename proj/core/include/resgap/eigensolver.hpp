#pragma once

#include <complex>
#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Sparse>

#include "resgap/errors.hpp"

namespace resgap {

using SparseReal = Eigen::SparseMatrix<double>;
using SparseComplex = Eigen::SparseMatrix<std::complex<double>>;

struct EigenOptions {
    double residual_tol = 1e-8;  // bound on ||A u - lambda u|| / ||u|| per pair
    int max_basis = 200;         // Krylov basis cap before giving up
    int dense_threshold = 1500;  // below this dimension solve densely
    std::uint64_t seed = 0x2575f5dd5eedULL;  // start-vector seed (reproducible runs)
    // Certify the count of eigenvalues below the reported k-th one by the
    // inertia of a shifted factorization; catches degenerate copies that a
    // residual test alone cannot see. Skipped when the indefinite
    // factorization breaks down.
    bool verify_count = true;
};

struct EigenResult {
    std::vector<double> values;     // ascending
    std::vector<double> residuals;  // matching ||A u - lambda u|| / ||u||
};

// Hermitian positive semi-definite sparse operator, real-symmetric or complex
// Hermitian depending on the boundary phases that built it.
class SparseOperator {
public:
    explicit SparseOperator(SparseReal matrix) : mat_(std::move(matrix)) {}
    explicit SparseOperator(SparseComplex matrix) : mat_(std::move(matrix)) {}

    int size() const;
    bool is_real() const { return std::holds_alternative<SparseReal>(mat_); }
    const SparseReal& real() const { return std::get<SparseReal>(mat_); }
    const SparseComplex& cplx() const { return std::get<SparseComplex>(mat_); }

    // max entrywise |A - A^*|; zero for operators assembled here.
    double hermitian_defect() const;

private:
    std::variant<SparseReal, SparseComplex> mat_;
};

// k smallest eigenvalues of a Hermitian PSD operator. Small problems are
// solved densely; otherwise shift-invert Lanczos at shift -1 (the factored
// operator is A + I, Hermitian positive definite) with full
// reorthogonalization. Convergence is certified by the true residual
// ||A u - lambda u|| / ||u|| <= residual_tol; NoConvergence reports the best
// residual reached when the basis cap is hit.
EigenResult lowest_eigenvalues(const SparseOperator& op, int k,
                               const EigenOptions& opts = {});

}  // namespace resgap
