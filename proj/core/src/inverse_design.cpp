#include "resgap/inverse_design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

namespace resgap {

namespace {

constexpr double kGeomRelTol = 1e-9;       // geometry bookkeeping comparisons
constexpr double kClearanceSafety = 1.02;  // keep d_j strictly above eta_j

double checked_gamma(double gamma) {
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw ValidationError("gamma must lie in (0, 1), got " + std::to_string(gamma));
    }
    return gamma;
}

}  // namespace

void TargetGaps::validate() const {
    if (alphas.empty() || alphas.size() != betas.size()) {
        throw ValidationError("TargetGaps: need m >= 1 and equal-length endpoint lists");
    }
    if (!(alphas.front() > 0.0)) {
        throw ValidationError("TargetGaps: endpoints must be positive");
    }
    for (std::size_t j = 0; j < alphas.size(); ++j) {
        bool ok = alphas[j] < betas[j] &&
                  (j + 1 == alphas.size() || betas[j] < alphas[j + 1]);
        if (!ok) {
            throw ValidationError("TargetGaps: interlacing violated at index " +
                                  std::to_string(j));
        }
    }
}

void DesignSolution::validate() const {
    double tau_sum = 0.0, rho_sum = 0.0;
    for (double r : rhos) rho_sum += r;
    for (std::size_t j = 0; j < taus.size(); ++j) {
        if (!(taus[j] > 0.0)) throw ValidationError("tau_j must be positive");
        tau_sum += taus[j];
    }
    if (!(tau_sum < 1.0)) throw ValidationError("sum of taus must be below 1");
    const double denom = gamma * gamma + rho_sum;
    for (std::size_t j = 0; j < taus.size(); ++j) {
        if (std::abs(taus[j] * denom - rhos[j]) > kGeomRelTol * rhos[j]) {
            throw ValidationError("rho/tau consistency broken at index " +
                                  std::to_string(j));
        }
    }
}

std::vector<double> solve_rho_closed_form(const TargetGaps& targets) {
    targets.validate();
    const auto& a = targets.alphas;
    const auto& b = targets.betas;
    const std::size_t m = targets.size();

    std::vector<double> rho(m);
    for (std::size_t j = 0; j < m; ++j) {
        double value = (b[j] - a[j]) / a[j];
        for (std::size_t i = 0; i < m; ++i) {
            if (i == j) continue;
            value *= (b[i] - a[j]) / (a[i] - a[j]);
        }
        if (!(value > 0.0)) {
            throw NonPositiveRho("rho_" + std::to_string(j + 1) + " = " +
                                 std::to_string(value) + " is not positive");
        }
        rho[j] = value;
    }
    return rho;
}

std::vector<double> solve_rho_linear_system(const TargetGaps& targets) {
    targets.validate();
    const auto& a = targets.alphas;
    const auto& b = targets.betas;
    const int m = static_cast<int>(targets.size());

    Eigen::MatrixXd coeff(m, m);
    for (int k = 0; k < m; ++k) {
        for (int j = 0; j < m; ++j) {
            coeff(k, j) = a[j] / (a[j] - b[k]);
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(coeff);
    if (!lu.isInvertible()) {
        throw SingularSystem("gap-target system is numerically singular");
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Constant(m, -1.0);
    Eigen::VectorXd rho = lu.solve(rhs);
    return std::vector<double>(rho.data(), rho.data() + m);
}

std::vector<double> compute_taus(const std::vector<double>& rhos, double gamma, int n) {
    checked_gamma(gamma);
    if (n < 2) throw ValidationError("compute_taus: n must be >= 2");
    double denom = std::pow(gamma, n);
    for (double r : rhos) {
        if (!(r > 0.0)) throw ValidationError("compute_taus: rhos must be positive");
        denom += r;
    }
    std::vector<double> taus(rhos.size());
    for (std::size_t j = 0; j < rhos.size(); ++j) taus[j] = rhos[j] / denom;
    return taus;
}

namespace {

struct RowLayout {
    std::vector<double> widths;
    std::vector<double> heights;
    double spacing = 0.0;
};

// Allocate shell widths in a single row. Width preference is the square
// side sqrt(tau); lower bounds come from the cell height and from the passage
// clearance requirement d_j > eta_j, which for this layout reads
// w_j^2 > 2 * alpha_j * gamma * (1-gamma) * tau_j^2.
RowLayout allocate_row(const std::vector<double>& taus, const std::vector<double>& alphas,
                       double gamma, double margin, std::size_t m) {
    if (!(margin > 0.0)) throw ValidationError("layout_margin must be positive");
    const double avail_w = 1.0 - static_cast<double>(m + 1) * margin;
    const double avail_h = 1.0 - 2.0 * margin;
    if (avail_w <= 0.0 || avail_h <= 0.0) {
        throw InfeasibleLayout("layout_margin leaves no room in the unit cell");
    }

    std::vector<double> w_area(m), w_clear(m), w_min(m), w_pref(m);
    double sum_area_min = 0.0, sum_min = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        w_area[j] = taus[j] / avail_h;
        w_clear[j] = std::sqrt(2.0 * alphas[j] * gamma * (1.0 - gamma)) * taus[j] *
                     kClearanceSafety;
        w_min[j] = std::max(w_area[j], w_clear[j]);
        w_pref[j] = std::sqrt(taus[j]);
        sum_area_min += w_area[j];
        sum_min += w_min[j];
    }

    if (sum_min > avail_w) {
        if (sum_area_min > avail_w) {
            throw InfeasibleLayout(
                "shells of total area " +
                std::to_string(std::accumulate(taus.begin(), taus.end(), 0.0)) +
                " cannot be packed in a row with margin " + std::to_string(margin));
        }
        throw GammaTooLarge(
            "no width allocation keeps the passage clearance d_j above eta_j; "
            "adjust gamma or the targets");
    }

    auto widths_at = [&](double c) {
        std::vector<double> w(m);
        for (std::size_t j = 0; j < m; ++j) w[j] = std::max(w_min[j], c * w_pref[j]);
        return w;
    };
    auto total = [&](double c) {
        auto w = widths_at(c);
        return std::accumulate(w.begin(), w.end(), 0.0);
    };

    double c = 1.0;
    if (total(1.0) > avail_w) {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            (total(mid) > avail_w ? hi : lo) = mid;
        }
        c = lo;
    }

    RowLayout layout;
    layout.widths = widths_at(c);
    layout.heights.resize(m);
    for (std::size_t j = 0; j < m; ++j) layout.heights[j] = taus[j] / layout.widths[j];
    double used = std::accumulate(layout.widths.begin(), layout.widths.end(), 0.0);
    layout.spacing = (1.0 - used) / static_cast<double>(m + 1);
    return layout;
}

}  // namespace

DesignSolution solve_design(const TargetGaps& targets, double gamma, double layout_margin) {
    CellGeometry2D geometry = synthesize_geometry(targets, gamma, layout_margin);
    DesignSolution sol;
    sol.gamma = gamma;
    sol.rhos = solve_rho_closed_form(targets);
    sol.taus = compute_taus(sol.rhos, gamma, 2);
    sol.etas.reserve(geometry.passages.size());
    for (const auto& p : geometry.passages) sol.etas.push_back(p.eta);
    sol.validate();
    return sol;
}

CellGeometry2D synthesize_geometry(const TargetGaps& targets, double gamma,
                                   double layout_margin) {
    targets.validate();
    checked_gamma(gamma);

    const std::size_t m = targets.size();
    const auto rhos = solve_rho_closed_form(targets);
    const auto taus = compute_taus(rhos, gamma, 2);
    const RowLayout layout = allocate_row(taus, targets.alphas, gamma, layout_margin, m);

    CellGeometry2D geom;
    geom.rects_f.resize(m);
    geom.rects_b.resize(m);
    geom.passages.resize(m);

    double cursor = layout.spacing;
    double f_area_sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double w = layout.widths[j];
        const double hf = layout.heights[j];
        Rect f{cursor, 0.5 - 0.5 * hf, cursor + w, 0.5 + 0.5 * hf};
        cursor += w + layout.spacing;

        // Chamber: homothety of the shell about its center with ratio gamma.
        Rect b{f.cx() - 0.5 * gamma * w, f.cy() - 0.5 * gamma * hf,
               f.cx() + 0.5 * gamma * w, f.cy() + 0.5 * gamma * hf};

        Passage p;
        p.h = f.y1 - b.y1;  // (1-gamma)/2 * height(F)
        p.zx = f.cx();
        p.zy = 0.5 * (b.y1 + f.y1);
        p.eta = targets.alphas[j] * p.h * b.area();  // |D| = 1, n = 2
        p.d = 0.25 * b.width();
        if (!(p.d > p.eta)) {
            throw GammaTooLarge("passage clearance d = " + std::to_string(p.d) +
                                " does not exceed eta = " + std::to_string(p.eta) +
                                " at resonator " + std::to_string(j));
        }

        geom.rects_f[j] = f;
        geom.rects_b[j] = b;
        geom.passages[j] = p;
        f_area_sum += f.area();
    }
    geom.b0_area = 1.0 - f_area_sum;
    geom.validate();
    return geom;
}

void CellGeometry2D::validate() const {
    const std::size_t m = rects_f.size();
    if (rects_b.size() != m || passages.size() != m) {
        throw ValidationError("CellGeometry2D: per-resonator lists disagree in length");
    }
    double f_area_sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const Rect& f = rects_f[j];
        const Rect& b = rects_b[j];
        const Passage& p = passages[j];

        if (!(f.x0 > 0.0 && f.y0 > 0.0 && f.x1 < 1.0 && f.y1 < 1.0 && f.x0 < f.x1 &&
              f.y0 < f.y1)) {
            throw ValidationError("shell rectangle not strictly inside the unit cell");
        }
        if (!(b.x0 > f.x0 && b.y0 > f.y0 && b.x1 < f.x1 && b.y1 < f.y1 && b.x0 < b.x1 &&
              b.y0 < b.y1)) {
            throw ValidationError("chamber closure must lie in the shell interior");
        }
        for (std::size_t i = 0; i < j; ++i) {
            const Rect& g = rects_f[i];
            bool disjoint = f.x1 < g.x0 || g.x1 < f.x0 || f.y1 < g.y0 || g.y1 < f.y0;
            if (!disjoint) throw ValidationError("shell closures overlap");
        }

        if (!(p.h > 0.0 && p.eta > 0.0 && p.d > 0.0)) {
            throw ValidationError("passage parameters must be positive");
        }
        const double top = p.zy + 0.5 * p.h;
        const double bottom = p.zy - 0.5 * p.h;
        const double scale = std::max(1.0, std::abs(f.y1));
        if (std::abs(top - f.y1) > kGeomRelTol * scale ||
            std::abs(bottom - b.y1) > kGeomRelTol * scale) {
            throw ValidationError(
                "passage axis must run from the chamber top to the shell top");
        }
        // Clearance strip: top face on the shell boundary, bottom face on the
        // chamber boundary, interior inside shell-minus-chamber.
        if (!(p.zx - p.d >= b.x0 && p.zx + p.d <= b.x1 && p.zx - p.d > f.x0 &&
              p.zx + p.d < f.x1)) {
            throw ValidationError("clearance strip escapes the shell/chamber faces");
        }
        f_area_sum += f.area();
    }
    if (std::abs(b0_area - (1.0 - f_area_sum)) > kGeomRelTol) {
        throw ValidationError("b0_area does not match 1 - sum of shell areas");
    }
    if (!(b0_area > 0.0)) throw ValidationError("b0_area must be positive");
}

UnitCellModel CellGeometry2D::to_unit_cell_model() const {
    if (rects_f.empty()) {
        throw ValidationError("empty geometry has no limit model");
    }
    std::vector<ResonatorSpec> specs(rects_f.size());
    for (std::size_t j = 0; j < rects_f.size(); ++j) {
        specs[j].h = passages[j].h;
        specs[j].eta = passages[j].eta;
        specs[j].d_profile_measure = 1.0;
        specs[j].b_volume = rects_b[j].area();
    }
    return UnitCellModel(2, std::move(specs), b0_area);
}

GapReport roundtrip_verify(const CellGeometry2D& geometry, const TargetGaps& targets) {
    targets.validate();
    geometry.validate();
    if (geometry.resonator_count() != targets.size()) {
        throw ValidationError("geometry and targets disagree on resonator count");
    }

    UnitCellModel model = geometry.to_unit_cell_model();
    GapReport report = compute_betas(model);

    double worst = 0.0;
    std::size_t worst_index = 0;
    for (std::size_t j = 0; j < targets.size(); ++j) {
        double da = std::abs(report.alphas[j] - targets.alphas[j]) / targets.alphas[j];
        double db = std::abs(report.betas[j] - targets.betas[j]) / targets.betas[j];
        double d = std::max(da, db);
        if (d > worst) {
            worst = d;
            worst_index = j;
        }
    }
    if (worst > 1e-9) {
        throw RoundtripMismatch("roundtrip deviation " + std::to_string(worst) +
                                " at resonator " + std::to_string(worst_index) +
                                " exceeds 1e-9");
    }
    return report;
}

}  // namespace resgap
