#include "resgap/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

namespace resgap {

namespace {

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
void fill_random(Vec<Scalar>& v, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if constexpr (std::is_same_v<Scalar, std::complex<double>>) {
            v[i] = Scalar(dist(rng), dist(rng));
        } else {
            v[i] = dist(rng);
        }
    }
}

template <class Scalar>
EigenResult dense_smallest(const Eigen::SparseMatrix<Scalar>& A, int k) {
    Mat<Scalar> dense = Mat<Scalar>(A);
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(dense);
    EigenResult out;
    out.values.resize(k);
    out.residuals.resize(k);
    for (int i = 0; i < k; ++i) {
        out.values[i] = es.eigenvalues()[i];
        Vec<Scalar> u = es.eigenvectors().col(i);
        out.residuals[i] = (A * u - Scalar(out.values[i]) * u).norm() / u.norm();
    }
    return out;
}

// Number of eigenvalues of A below sigma, from the inertia of A - sigma*I.
// Returns -1 when the unpivoted indefinite factorization is not trustworthy.
template <class Scalar>
int count_below(const Eigen::SparseMatrix<Scalar>& A, double sigma) {
    using SpMat = Eigen::SparseMatrix<Scalar>;
    SpMat eye(A.rows(), A.rows());
    eye.setIdentity();
    SpMat shifted = (A - Scalar(sigma) * eye).eval();
    shifted.makeCompressed();
    Eigen::SimplicialLDLT<SpMat> ldlt(shifted);
    if (ldlt.info() != Eigen::Success) return -1;
    auto d = ldlt.vectorD();
    int negatives = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        const double value = std::real(Scalar(d[i]));
        if (!std::isfinite(value) || value == 0.0) return -1;
        if (value < 0.0) ++negatives;
    }
    return negatives;
}

// Shift-invert Lanczos on B = (A + I)^{-1}: the k largest Ritz values of B
// map to the k smallest eigenvalues of A via lambda = 1/mu - 1.
template <class Scalar>
EigenResult lanczos_smallest(const Eigen::SparseMatrix<Scalar>& A, int k,
                             const EigenOptions& opts) {
    using SpMat = Eigen::SparseMatrix<Scalar>;
    const Eigen::Index n = A.rows();

    SpMat M = A;
    {
        SpMat eye(n, n);
        eye.setIdentity();
        M = (A + eye).eval();
    }
    M.makeCompressed();
    Eigen::SimplicialLDLT<SpMat> ldlt(M);
    if (ldlt.info() != Eigen::Success) {
        throw Error(ErrorCategory::invariant, "sparse LDLT factorization failed");
    }

    const int max_basis = static_cast<int>(
        std::min<Eigen::Index>(n, std::max(opts.max_basis, 2 * k + 16)));
    Mat<Scalar> V(n, max_basis);
    std::vector<double> diag, offdiag;
    diag.reserve(max_basis);
    offdiag.reserve(max_basis);

    std::mt19937_64 rng(opts.seed);
    Vec<Scalar> w(n);
    fill_random(w, rng);
    V.col(0) = w / w.norm();

    double best_worst_residual = std::numeric_limits<double>::infinity();
    EigenResult best;

    for (int j = 0; j < max_basis; ++j) {
        w = ldlt.solve(V.col(j));
        diag.push_back(std::real(Scalar(V.col(j).dot(w))));
        w -= Scalar(diag[j]) * V.col(j);
        if (j > 0) w -= Scalar(offdiag[j - 1]) * V.col(j - 1);
        for (int pass = 0; pass < 2; ++pass) {
            auto basis = V.leftCols(j + 1);
            w -= basis * (basis.adjoint() * w).eval();
        }
        double norm_w = w.norm();

        const bool last = (j + 1 == max_basis) || (j + 1 == n);
        const bool breakdown = norm_w < 1e-12;
        if (j + 1 >= k && ((j + 1) % 8 == 0 || last || breakdown)) {
            Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(j + 1, j + 1);
            for (int i = 0; i <= j; ++i) {
                tri(i, i) = diag[i];
                if (i > 0) {
                    tri(i, i - 1) = offdiag[i - 1];
                    tri(i - 1, i) = offdiag[i - 1];
                }
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);

            // Largest k Ritz values of B, i.e. the rightmost columns.
            EigenResult current;
            current.values.resize(k);
            current.residuals.resize(k);
            double worst = 0.0;
            for (int i = 0; i < k; ++i) {
                const int col = j - i;  // descending mu
                double mu = es.eigenvalues()[col];
                mu = std::max(mu, 1e-300);
                double lambda = 1.0 / mu - 1.0;
                Vec<Scalar> u =
                    V.leftCols(j + 1) * es.eigenvectors().col(col).cast<Scalar>();
                double resid = (A * u - Scalar(lambda) * u).norm() / u.norm();
                current.values[i] = lambda;  // i = 0 is the largest mu, smallest lambda
                current.residuals[i] = resid;
                worst = std::max(worst, resid);
            }
            if (worst < best_worst_residual) {
                best_worst_residual = worst;
                best = current;
            }
            if (worst <= opts.residual_tol) {
                if (!opts.verify_count) return current;
                // Slice the spectrum just past the k-th value (stepping over
                // any Ritz cluster) and compare the inertia count.
                const int n_ritz = j + 1;
                std::vector<double> ritz(n_ritz);
                for (int i = 0; i < n_ritz; ++i) {
                    double mu = std::max(es.eigenvalues()[n_ritz - 1 - i], 1e-300);
                    ritz[i] = 1.0 / mu - 1.0;
                }
                int r = k - 1;
                while (r + 1 < n_ritz && r < k + 3 &&
                       ritz[r + 1] - ritz[r] <= 1e-6 * (std::abs(ritz[r]) + 1.0)) {
                    ++r;
                }
                if (r + 1 >= n_ritz || r >= k + 3) return current;  // no safe slice
                const double sigma = 0.5 * (ritz[r] + ritz[r + 1]);
                const int actual = count_below(A, sigma);
                if (actual <= r + 1) return current;  // includes "unknown" (-1)
                // Inertia saw more eigenvalues below sigma than the basis
                // carries: a degenerate copy has not surfaced yet. Keep
                // expanding.
            }
        }

        if (last) break;

        if (breakdown) {
            // Invariant subspace exhausted; continue with a fresh direction.
            fill_random(w, rng);
            for (int pass = 0; pass < 2; ++pass) {
                auto basis = V.leftCols(j + 1);
                w -= basis * (basis.adjoint() * w).eval();
            }
            norm_w = w.norm();
            if (norm_w < 1e-12) break;
            offdiag.push_back(0.0);
        } else {
            offdiag.push_back(norm_w);
        }
        V.col(j + 1) = w / norm_w;
    }

    throw NoConvergence(
        "eigensolver: basis cap " + std::to_string(max_basis) +
            " hit with best residual " + std::to_string(best_worst_residual) +
            (best_worst_residual <= opts.residual_tol
                 ? " (eigenvalue count below the slice never certified)"
                 : ""),
        best_worst_residual);
}

}  // namespace

int SparseOperator::size() const {
    return is_real() ? static_cast<int>(real().rows()) : static_cast<int>(cplx().rows());
}

double SparseOperator::hermitian_defect() const {
    double defect = 0.0;
    if (is_real()) {
        SparseReal diff = SparseReal(real() - SparseReal(real().transpose()));
        for (int c = 0; c < diff.outerSize(); ++c) {
            for (SparseReal::InnerIterator it(diff, c); it; ++it) {
                defect = std::max(defect, std::abs(it.value()));
            }
        }
    } else {
        SparseComplex diff = SparseComplex(cplx() - SparseComplex(cplx().adjoint()));
        for (int c = 0; c < diff.outerSize(); ++c) {
            for (SparseComplex::InnerIterator it(diff, c); it; ++it) {
                defect = std::max(defect, std::abs(it.value()));
            }
        }
    }
    return defect;
}

EigenResult lowest_eigenvalues(const SparseOperator& op, int k, const EigenOptions& opts) {
    const int n = op.size();
    if (k < 1 || k > n) {
        throw ValidationError("requested " + std::to_string(k) +
                              " eigenvalues of an operator of size " + std::to_string(n));
    }
    if (n <= opts.dense_threshold) {
        EigenResult out = op.is_real() ? dense_smallest(op.real(), k)
                                       : dense_smallest(op.cplx(), k);
        for (double r : out.residuals) {
            if (!(r <= opts.residual_tol)) {
                throw NoConvergence("dense eigensolve residual " + std::to_string(r) +
                                        " above tolerance",
                                    r);
            }
        }
        return out;
    }
    return op.is_real() ? lanczos_smallest(op.real(), k, opts)
                        : lanczos_smallest(op.cplx(), k, opts);
}

}  // namespace resgap
