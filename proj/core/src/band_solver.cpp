#include "resgap/band_solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <exception>
#include <thread>

namespace resgap {

namespace {

constexpr double kBracketSlackRel = 1e-6;
constexpr double kGapWidthRel = 1e-6;  // narrower openings count as band contact

int thread_budget(std::size_t jobs) {
    unsigned hw = std::thread::hardware_concurrency();
    int budget = static_cast<int>(std::min(hw == 0 ? 1u : hw, 4u));
    if (const char* env = std::getenv("RESGAP_THREADS")) {
        int requested = std::atoi(env);
        if (requested >= 1) budget = requested;
    }
    return static_cast<int>(std::min<std::size_t>(budget, jobs));
}

struct FaceCoef {
    // Assembly coefficients for one outer-boundary crossing direction.
    std::complex<double> phase;
};

template <class Scalar>
SparseOperator assemble_impl(const RasterCell& cell, const BoundaryCondition& bc) {
    const int n_grid = cell.grid_n;
    const double w = static_cast<double>(n_grid) * n_grid /
                     (cell.epsilon * cell.epsilon);  // eps^-2 / h^2

    std::vector<std::int32_t> index(static_cast<std::size_t>(n_grid) * n_grid, -1);
    std::int32_t count = 0;
    for (std::size_t p = 0; p < index.size(); ++p) {
        if (cell.mask[p]) index[p] = count++;
    }

    // Phase factors for crossing the outer boundary in +x/-x/+y/-y. Exact
    // conjugate pairs keep the assembled matrix Hermitian to the bit.
    Scalar phase_pos_x, phase_neg_x, phase_pos_y, phase_neg_y;
    if constexpr (std::is_same_v<Scalar, double>) {
        phase_pos_x = (bc.theta_x == 0.0) ? 1.0 : -1.0;
        phase_neg_x = phase_pos_x;
        phase_pos_y = (bc.theta_y == 0.0) ? 1.0 : -1.0;
        phase_neg_y = phase_pos_y;
    } else {
        phase_pos_x = std::exp(std::complex<double>(0.0, bc.theta_x));
        phase_neg_x = std::conj(phase_pos_x);
        phase_pos_y = std::exp(std::complex<double>(0.0, bc.theta_y));
        phase_neg_y = std::conj(phase_pos_y);
    }

    std::vector<Eigen::Triplet<Scalar>> trips;
    trips.reserve(static_cast<std::size_t>(count) * 5);

    const int dx[4] = {1, -1, 0, 0};
    const int dy[4] = {0, 0, 1, -1};
    const Scalar wrap_phase[4] = {phase_pos_x, phase_neg_x, phase_pos_y, phase_neg_y};

    for (int iy = 0; iy < n_grid; ++iy) {
        for (int ix = 0; ix < n_grid; ++ix) {
            const std::int32_t p = index[static_cast<std::size_t>(iy) * n_grid + ix];
            if (p < 0) continue;
            double diag = 0.0;
            for (int dir = 0; dir < 4; ++dir) {
                const int jx = ix + dx[dir];
                const int jy = iy + dy[dir];
                if (jx >= 0 && jx < n_grid && jy >= 0 && jy < n_grid) {
                    const std::int32_t q =
                        index[static_cast<std::size_t>(jy) * n_grid + jx];
                    if (q < 0) continue;  // wall face: Neumann, no flux
                    diag += w;
                    trips.emplace_back(p, q, Scalar(-w));
                    continue;
                }
                switch (bc.kind) {
                    case BoundaryCondition::Kind::neumann_outer:
                        break;  // free outer face
                    case BoundaryCondition::Kind::dirichlet_outer:
                        diag += 2.0 * w;  // mirrored ghost forces u = 0 on the face
                        break;
                    case BoundaryCondition::Kind::quasi: {
                        const int wx = (jx + n_grid) % n_grid;
                        const int wy = (jy + n_grid) % n_grid;
                        const std::int32_t q =
                            index[static_cast<std::size_t>(wy) * n_grid + wx];
                        if (q < 0) break;  // wrapped partner is solid
                        diag += w;
                        trips.emplace_back(p, q, Scalar(-w) * wrap_phase[dir]);
                        break;
                    }
                }
            }
            trips.emplace_back(p, p, Scalar(diag));
        }
    }

    Eigen::SparseMatrix<Scalar> mat(count, count);
    mat.setFromTriplets(trips.begin(), trips.end());
    mat.makeCompressed();
    return SparseOperator(std::move(mat));
}

void verify_bracketing(const SpectrumSlice& neumann, const SpectrumSlice& quasi,
                       const SpectrumSlice& dirichlet, double* worst) {
    for (std::size_t k = 0; k < quasi.eigenvalues.size(); ++k) {
        const double slack = kBracketSlackRel * std::abs(dirichlet.eigenvalues[k]);
        const double low_violation = neumann.eigenvalues[k] - quasi.eigenvalues[k];
        const double high_violation = quasi.eigenvalues[k] - dirichlet.eigenvalues[k];
        const double violation = std::max(low_violation, high_violation);
        *worst = std::max(*worst, violation);
        if (violation > slack) {
            throw BracketingViolation(
                "min-max enclosure violated at " + quasi.bc.label() + ", k = " +
                std::to_string(k + 1) + ": N=" + std::to_string(neumann.eigenvalues[k]) +
                " theta=" + std::to_string(quasi.eigenvalues[k]) +
                " D=" + std::to_string(dirichlet.eigenvalues[k]));
        }
    }
}

double rel_dev(double value, double reference) {
    return std::abs(value - reference) / std::abs(reference);
}

}  // namespace

BoundaryCondition BoundaryCondition::quasi(double tx, double ty) {
    const double two_pi = 2.0 * M_PI;
    if (!(tx >= 0.0) || tx >= two_pi || !(ty >= 0.0) || ty >= two_pi) {
        throw ValidationError("quasi-momentum components must lie in [0, 2*pi)");
    }
    return {Kind::quasi, tx, ty};
}

bool BoundaryCondition::phases_real() const {
    if (kind != Kind::quasi) return true;
    auto real_phase = [](double t) { return t == 0.0 || t == M_PI; };
    return real_phase(theta_x) && real_phase(theta_y);
}

std::string BoundaryCondition::label() const {
    switch (kind) {
        case Kind::neumann_outer:
            return "neumann";
        case Kind::dirichlet_outer:
            return "dirichlet";
        case Kind::quasi:
        default:
            return "theta(" + std::to_string(theta_x) + "," + std::to_string(theta_y) +
                   ")";
    }
}

std::vector<double> theta_axis(int theta_grid) {
    if (theta_grid < 2) {
        throw ValidationError("theta_grid must be >= 2 per axis");
    }
    std::vector<double> axis(theta_grid);
    for (int i = 0; i < theta_grid; ++i) {
        axis[i] = (i == theta_grid - 1) ? M_PI
                                        : M_PI * static_cast<double>(i) / (theta_grid - 1);
    }
    return axis;
}

SparseOperator assemble(const RasterCell& cell, const BoundaryCondition& bc) {
    if (bc.phases_real()) return assemble_impl<double>(cell, bc);
    return assemble_impl<std::complex<double>>(cell, bc);
}

SpectrumSlice solve_slice(const RasterCell& cell, const BoundaryCondition& bc, int k_max,
                          const EigenOptions& opts) {
    SparseOperator op = assemble(cell, bc);
    EigenResult result = lowest_eigenvalues(op, k_max, opts);
    return SpectrumSlice{bc, std::move(result.values), std::move(result.residuals)};
}

BandSweep sweep_bands(const RasterCell& cell, int theta_grid, int k_max, double cutoff,
                      const EigenOptions& opts) {
    if (k_max < 1) throw ValidationError("k_max must be >= 1");

    BandSweep sweep;
    sweep.cutoff = cutoff;
    const std::vector<double> axis = theta_axis(theta_grid);
    for (double ty : axis) {
        for (double tx : axis) {
            sweep.theta_samples.push_back({tx, ty});
        }
    }

    sweep.neumann = solve_slice(cell, BoundaryCondition::neumann(), k_max, opts);
    sweep.dirichlet = solve_slice(cell, BoundaryCondition::dirichlet(), k_max, opts);

    // Theta slices are independent; run them on a small pool when allowed.
    const std::size_t jobs = sweep.theta_samples.size();
    sweep.slices.resize(jobs);
    std::vector<std::exception_ptr> failures(jobs);
    const int threads = thread_budget(jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < jobs; i = next.fetch_add(1)) {
            try {
                auto bc = BoundaryCondition::quasi(sweep.theta_samples[i][0],
                                                   sweep.theta_samples[i][1]);
                sweep.slices[i] = solve_slice(cell, bc, k_max, opts);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }

    sweep.bracket_worst = -std::numeric_limits<double>::infinity();
    for (const auto& slice : sweep.slices) {
        verify_bracketing(sweep.neumann, slice, sweep.dirichlet, &sweep.bracket_worst);
    }

    sweep.bands.resize(k_max);
    for (int k = 0; k < k_max; ++k) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto& slice : sweep.slices) {
            lo = std::min(lo, slice.eigenvalues[k]);
            hi = std::max(hi, slice.eigenvalues[k]);
        }
        sweep.bands[k] = {lo, hi};
    }

    // Gaps: openings between the running coverage of bands 1..k and band k+1.
    double coverage = sweep.bands[0].hi;
    for (int k = 1; k < k_max; ++k) {
        const double lo_next = sweep.bands[k].lo;
        if (lo_next - coverage > kGapWidthRel * std::abs(coverage) &&
            lo_next <= cutoff) {
            sweep.gaps.push_back({k, coverage, lo_next});
        }
        coverage = std::max(coverage, sweep.bands[k].hi);
    }
    return sweep;
}

double estimate_lambda(const CellGeometry2D& geometry, int theta_grid, int grid_n,
                       const EigenOptions& opts) {
    RasterCell outer = rasterize_outer(geometry, grid_n);
    const std::vector<double> axis = theta_axis(theta_grid);
    double lambda_hat = 0.0;
    for (double ty : axis) {
        for (double tx : axis) {
            auto slice = solve_slice(outer, BoundaryCondition::quasi(tx, ty), 1, opts);
            lambda_hat = std::max(lambda_hat, slice.eigenvalues[0]);
        }
    }
    return lambda_hat;
}

StudyTable convergence_study(const TargetGaps& targets, double gamma,
                             const std::vector<double>& eps_list, int grid_n_cap,
                             int theta_grid, const EigenOptions& opts) {
    if (eps_list.empty()) throw ValidationError("epsilon list is empty");
    for (std::size_t i = 0; i + 1 < eps_list.size(); ++i) {
        if (!(eps_list[i] > eps_list[i + 1])) {
            throw ValidationError("epsilon list must be strictly decreasing");
        }
    }
    if (!(eps_list.back() > 0.0)) throw ValidationError("epsilons must be positive");

    const CellGeometry2D geometry = synthesize_geometry(targets, gamma);
    const UnitCellModel model = geometry.to_unit_cell_model();
    const GapReport limit = compute_betas(model);
    const std::size_t m = targets.size();
    const int k_max = static_cast<int>(m) + 2;

    double eta_min = std::numeric_limits<double>::infinity();
    for (const auto& p : geometry.passages) eta_min = std::min(eta_min, p.eta);

    StudyTable table;
    table.limit_alphas = limit.alphas;
    table.limit_betas = limit.betas;
    table.lambda_hat =
        estimate_lambda(geometry, theta_grid, std::min(grid_n_cap, 256), opts);

    for (double eps : eps_list) {
        // Smallest grid that gives every passage >= 3 cells keeps the relative
        // passage resolution fixed along the ladder.
        int grid_n = static_cast<int>(std::ceil(3.0 / (eta_min * eps * eps)));
        grid_n = std::clamp(grid_n, 64, grid_n_cap);

        RasterCell cell = rasterize(geometry, eps, grid_n);
        const double cutoff = table.lambda_hat / (eps * eps);
        BandSweep sweep = sweep_bands(cell, theta_grid, k_max, cutoff, opts);

        StudyRow row;
        row.epsilon = eps;
        row.grid_n = grid_n;
        row.cutoff = cutoff;
        row.lambda_neumann.assign(sweep.neumann.eigenvalues.begin(),
                                  sweep.neumann.eigenvalues.begin() + m + 1);
        row.lambda_dirichlet.assign(sweep.dirichlet.eigenvalues.begin(),
                                    sweep.dirichlet.eigenvalues.begin() + m);
        row.gaps = sweep.gaps;
        row.gap_count = static_cast<int>(sweep.gaps.size());

        row.dev_gap_lo.assign(m, std::numeric_limits<double>::quiet_NaN());
        row.dev_gap_hi.assign(m, std::numeric_limits<double>::quiet_NaN());
        for (std::size_t j = 0; j < m && j < sweep.gaps.size(); ++j) {
            row.dev_gap_lo[j] = rel_dev(sweep.gaps[j].lo, limit.alphas[j]);
            row.dev_gap_hi[j] = rel_dev(sweep.gaps[j].hi, limit.betas[j]);
        }
        row.dev_dirichlet.resize(m);
        row.dev_neumann.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            row.dev_dirichlet[j] = rel_dev(row.lambda_dirichlet[j], limit.alphas[j]);
            row.dev_neumann[j] = rel_dev(row.lambda_neumann[j + 1], limit.betas[j]);
        }
        table.rows.push_back(std::move(row));
    }

    auto check_trend = [&table](const char* what, std::size_t j,
                                auto&& value_of) {
        for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
            double a = value_of(table.rows[i], j);
            double b = value_of(table.rows[i + 1], j);
            if (std::isnan(a) || std::isnan(b) || b <= a) continue;
            table.trend_violations.push_back(
                std::string(what) + "[" + std::to_string(j + 1) + "]: " +
                std::to_string(a) + " -> " + std::to_string(b) + " between eps=" +
                std::to_string(table.rows[i].epsilon) + " and eps=" +
                std::to_string(table.rows[i + 1].epsilon));
        }
    };
    for (std::size_t j = 0; j < m; ++j) {
        check_trend("dev_gap_lo", j,
                    [](const StudyRow& r, std::size_t i) { return r.dev_gap_lo[i]; });
        check_trend("dev_gap_hi", j,
                    [](const StudyRow& r, std::size_t i) { return r.dev_gap_hi[i]; });
        check_trend("dev_dirichlet", j, [](const StudyRow& r, std::size_t i) {
            return r.dev_dirichlet[i];
        });
        check_trend("dev_neumann", j,
                    [](const StudyRow& r, std::size_t i) { return r.dev_neumann[i]; });
    }
    return table;
}

}  // namespace resgap
