#include "resgap/limit_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace resgap {

namespace {

std::string format_index(const char* what, std::size_t j) {
    return std::string(what) + " at resonator index " + std::to_string(j);
}

}  // namespace

void ResonatorSpec::validate() const {
    if (!(h > 0.0) || !(eta > 0.0) || !(d_profile_measure > 0.0) || !(b_volume > 0.0)) {
        throw ValidationError(
            "ResonatorSpec requires h, eta, d_profile_measure, b_volume all > 0");
    }
}

double ResonatorSpec::alpha(int n) const {
    return std::pow(eta, n - 1) * d_profile_measure / (h * b_volume);
}

UnitCellModel::UnitCellModel(int n, std::vector<ResonatorSpec> resonators, double b0_volume)
    : n_(n), resonators_(std::move(resonators)), b0_volume_(b0_volume) {
    if (n_ < 2) throw ValidationError("space dimension n must be >= 2");
    if (resonators_.empty()) throw ValidationError("at least one resonator required");
    if (!(b0_volume_ > 0.0)) throw ValidationError("b0_volume must be > 0");
    for (std::size_t j = 0; j < resonators_.size(); ++j) {
        try {
            resonators_[j].validate();
        } catch (const ValidationError&) {
            throw ValidationError(format_index("invalid parameters", j));
        }
    }

    std::vector<double> alphas(resonators_.size());
    for (std::size_t j = 0; j < resonators_.size(); ++j) alphas[j] = resonators_[j].alpha(n_);

    perm_.resize(alphas.size());
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    std::sort(perm_.begin(), perm_.end(),
              [&](std::size_t a, std::size_t b) { return alphas[a] < alphas[b]; });

    alphas_sorted_.resize(alphas.size());
    for (std::size_t i = 0; i < perm_.size(); ++i) alphas_sorted_[i] = alphas[perm_[i]];

    for (std::size_t i = 0; i + 1 < alphas_sorted_.size(); ++i) {
        double lo = alphas_sorted_[i], hi = alphas_sorted_[i + 1];
        if (hi - lo <= kDuplicateAlphaRelTol * hi) {
            throw DuplicateAlpha("alphas coincide within relative 1e-12: " +
                                 std::to_string(lo) + " vs " + std::to_string(hi));
        }
    }
}

std::vector<double> UnitCellModel::b_volumes_sorted() const {
    std::vector<double> out(perm_.size());
    for (std::size_t i = 0; i < perm_.size(); ++i) out[i] = resonators_[perm_[i]].b_volume;
    return out;
}

void GapReport::validate() const {
    if (alphas.size() != betas.size()) {
        throw ValidationError("GapReport: alphas and betas must have equal length");
    }
    for (std::size_t j = 0; j < alphas.size(); ++j) {
        bool ok = alphas[j] < betas[j] &&
                  (j + 1 == alphas.size() || betas[j] < alphas[j + 1]);
        if (!ok) {
            throw ValidationError(format_index("interlacing violated", j));
        }
    }
}

double WeightedMatrix::weighted_symmetry_defect() const {
    const int m = dim();
    double scale = 0.0, defect = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            double wa = weights[i] * entries(i, j);
            double atw = entries(j, i) * weights[j];
            scale = std::max(scale, std::max(std::abs(wa), std::abs(atw)));
            defect = std::max(defect, std::abs(wa - atw));
        }
    }
    return scale > 0.0 ? defect / scale : 0.0;
}

std::vector<double> compute_alphas(const UnitCellModel& model) {
    std::vector<double> out(model.resonator_count());
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = model.resonators()[j].alpha(model.dimension());
    }
    return out;
}

double gap_function(const UnitCellModel& model, double lambda) {
    const auto& alphas = model.alphas_sorted();
    const auto bvols = model.b_volumes_sorted();
    double sum = 1.0;
    for (std::size_t j = 0; j < alphas.size(); ++j) {
        double denom = alphas[j] - lambda;
        if (std::abs(denom) <= 1e-14 * alphas[j]) {
            throw PoleEvaluation("gap function evaluated at a pole, lambda = " +
                                 std::to_string(lambda));
        }
        sum += alphas[j] * bvols[j] / (model.b0_volume() * denom);
    }
    return sum;
}

double gap_function_derivative(const UnitCellModel& model, double lambda) {
    const auto& alphas = model.alphas_sorted();
    const auto bvols = model.b_volumes_sorted();
    double sum = 0.0;
    for (std::size_t j = 0; j < alphas.size(); ++j) {
        double denom = alphas[j] - lambda;
        sum += alphas[j] * bvols[j] / (model.b0_volume() * denom * denom);
    }
    return sum;
}

namespace detail {

double find_bracketed_root(const std::function<double(double)>& f,
                           const std::function<double(double)>& df, double lo, double hi,
                           double width_rel_tol, int newton_steps) {
    double flo = f(lo), fhi = f(hi);
    if (!(flo < 0.0) || !(fhi > 0.0)) {
        throw RootNotBracketed("no sign change on [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]");
    }
    const double width_tol = width_rel_tol * (hi - lo);
    while (hi - lo > width_tol) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval at rounding resolution
        double fmid = f(mid);
        if (fmid < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < newton_steps; ++it) {
        double fx = f(x);
        double dfx = df(x);
        if (dfx == 0.0) break;
        double next = x - fx / dfx;
        if (!(next > lo) || !(next < hi)) break;  // keep the bracket
        if (next == x) break;
        x = next;
    }
    return x;
}

}  // namespace detail

GapReport compute_betas(const UnitCellModel& model) {
    const auto& alphas = model.alphas_sorted();
    const auto bvols = model.b_volumes_sorted();
    const std::size_t m = alphas.size();

    double coupling_sum = 0.0;  // S = sum alpha_j |B_j| / |B_0|
    for (std::size_t j = 0; j < m; ++j) {
        coupling_sum += alphas[j] * bvols[j] / model.b0_volume();
    }

    auto f = [&](double x) { return gap_function(model, x); };
    auto df = [&](double x) { return gap_function_derivative(model, x); };

    GapReport report;
    report.alphas = alphas;
    report.betas.resize(m);

    for (std::size_t j = 0; j < m; ++j) {
        const double left_pole = alphas[j];
        const double right_end =
            (j + 1 < m) ? alphas[j + 1] : alphas[m - 1] + coupling_sum + 1.0;
        const double gap = right_end - left_pole;

        // F -> -inf at left_pole+ and F -> +inf at the next pole from below;
        // on the last bracket F(right_end) >= 1 - S/(S+1) > 0. Walk each free
        // endpoint toward its pole until the sign shows up.
        double lo = 0.0, hi = right_end;
        bool found_lo = false;
        bool found_hi = (j + 1 == m) && f(hi) > 0.0;
        double t = 0.25;
        for (int it = 0; it < 200 && !(found_lo && found_hi); ++it, t *= 0.25) {
            if (!found_lo) {
                lo = left_pole + t * gap;
                found_lo = f(lo) < 0.0;
            }
            if (!found_hi) {
                hi = right_end - t * gap;
                found_hi = f(hi) > 0.0;
            }
        }
        if (!found_lo || !found_hi) {
            throw RootNotBracketed(format_index("gap-function sign change missing", j));
        }
        report.betas[j] = detail::find_bracketed_root(f, df, lo, hi);
    }

    report.validate();
    return report;
}

WeightedMatrix neumann_limit_matrix(const UnitCellModel& model) {
    const auto& alphas = model.alphas_sorted();
    const auto bvols = model.b_volumes_sorted();
    const int m = static_cast<int>(alphas.size());

    WeightedMatrix out;
    out.entries = Eigen::MatrixXd::Zero(m + 1, m + 1);
    out.weights.resize(m + 1);
    out.weights[0] = model.b0_volume();

    double diag0 = 0.0;
    for (int j = 0; j < m; ++j) {
        const double coupling = alphas[j] * bvols[j] / model.b0_volume();
        diag0 += coupling;
        out.entries(0, j + 1) = -coupling;
        out.entries(j + 1, 0) = -alphas[j];
        out.entries(j + 1, j + 1) = alphas[j];
        out.weights[j + 1] = bvols[j];
    }
    out.entries(0, 0) = diag0;
    return out;
}

std::vector<double> neumann_limit_eigenvalues(const WeightedMatrix& matrix) {
    const int d = matrix.dim();
    Eigen::VectorXd sqrtw(d);
    for (int i = 0; i < d; ++i) sqrtw[i] = std::sqrt(matrix.weights[i]);

    Eigen::MatrixXd sym(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            sym(i, j) = sqrtw[i] * matrix.entries(i, j) / sqrtw[j];
        }
    }
    sym = 0.5 * (sym + sym.transpose().eval());  // kill rounding asymmetry

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    std::vector<double> vals(es.eigenvalues().data(), es.eigenvalues().data() + d);
    std::sort(vals.begin(), vals.end());
    if (std::abs(vals.front()) > 1e-10) {
        throw Error(ErrorCategory::invariant,
                    "chamber-coupling matrix: lowest eigenvalue " +
                        std::to_string(vals.front()) + " not zero within 1e-10");
    }
    return vals;
}

std::vector<double> dirichlet_limit_eigenvalues(const UnitCellModel& model) {
    return model.alphas_sorted();
}

std::vector<Interval> maxwell_gaps(const GapReport& report) {
    std::vector<Interval> out;
    out.reserve(2 * report.alphas.size());
    for (std::size_t j = 0; j < report.alphas.size(); ++j) {
        double ra = std::sqrt(report.alphas[j]);
        double rb = std::sqrt(report.betas[j]);
        out.push_back({-rb, -ra});
        out.push_back({ra, rb});
    }
    std::sort(out.begin(), out.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    return out;
}

}  // namespace resgap
