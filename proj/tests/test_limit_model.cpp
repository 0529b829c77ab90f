#include <doctest.h>

#include <cmath>
#include <random>

#include "resgap/limit_model.hpp"
#include "support/generators.hpp"

using namespace resgap;

namespace {

// alpha = eta^(n-1) |D| / (h |B|); pick h, eta, |D| so that alpha comes out as
// requested for the given chamber volume.
ResonatorSpec spec_for(double alpha, double b_volume) {
    ResonatorSpec s;
    s.h = 1.0;
    s.eta = 1.0;
    s.b_volume = b_volume;
    s.d_profile_measure = alpha * b_volume;
    return s;
}

UnitCellModel two_resonator_model(double b1, double b2, double b0 = 1.0) {
    return UnitCellModel(2, {spec_for(1.0, b1), spec_for(3.0, b2)}, b0);
}

}  // namespace

TEST_CASE("alpha formula on reference inputs") {
    UnitCellModel narrow(2, {ResonatorSpec{0.5, 1.0, 1.0, 0.04}}, 1.0);
    CHECK(compute_alphas(narrow)[0] == doctest::Approx(50.0).epsilon(1e-14));

    UnitCellModel ones(3, {ResonatorSpec{1.0, 1.0, 1.0, 1.0}}, 1.0);
    CHECK(compute_alphas(ones)[0] == doctest::Approx(1.0).epsilon(1e-14));

    // Identical resonators collide in alpha.
    CHECK_THROWS_AS(UnitCellModel(2,
                                  {ResonatorSpec{0.5, 1.0, 1.0, 0.04},
                                   ResonatorSpec{0.5, 1.0, 1.0, 0.04}},
                                  1.0),
                    DuplicateAlpha);
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS(UnitCellModel(1, {spec_for(1.0, 1.0)}, 1.0), ValidationError);
    CHECK_THROWS_AS(UnitCellModel(2, {}, 1.0), ValidationError);
    CHECK_THROWS_AS(UnitCellModel(2, {spec_for(1.0, 1.0)}, 0.0), ValidationError);
    CHECK_THROWS_AS(UnitCellModel(2, {ResonatorSpec{-1.0, 1.0, 1.0, 1.0}}, 1.0),
                    ValidationError);

    // Unsorted input: the permutation recovers ascending alphas.
    UnitCellModel model(2, {spec_for(3.0, 0.5), spec_for(1.0, 1.5)}, 1.0);
    CHECK(model.alphas_sorted()[0] == doctest::Approx(1.0));
    CHECK(model.alphas_sorted()[1] == doctest::Approx(3.0));
    CHECK(model.sort_permutation()[0] == 1);
    CHECK(model.sort_permutation()[1] == 0);
    CHECK(model.b_volumes_sorted()[0] == doctest::Approx(1.5));
}

TEST_CASE("gap function values") {
    UnitCellModel single(2, {spec_for(1.0, 1.0)}, 1.0);
    CHECK(gap_function(single, 2.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(gap_function(single, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(gap_function(single, 1.0), PoleEvaluation);

    UnitCellModel pair = two_resonator_model(1.5, 1.0 / 6.0);
    CHECK(gap_function(pair, 2.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(gap_function(pair, 4.0) == doctest::Approx(0.0).epsilon(1e-14));

    // F(0) = 1 + sum |B_j|/|B_0| for any model.
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20; ++i) {
        auto model = resgap::testing::random_model(rng, 1 + i % 6);
        double expected = 1.0;
        for (const auto& r : model.resonators()) {
            expected += r.b_volume / model.b0_volume();
        }
        CHECK(gap_function(model, 0.0) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("betas on closed-form cases") {
    UnitCellModel single(2, {spec_for(1.0, 1.0)}, 1.0);
    GapReport report = compute_betas(single);
    CHECK(report.betas[0] == doctest::Approx(2.0).epsilon(1e-12));

    GapReport pair = compute_betas(two_resonator_model(1.5, 1.0 / 6.0));
    CHECK(pair.betas[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(pair.betas[1] == doctest::Approx(4.0).epsilon(1e-10));

    // One resonator: beta = alpha (1 + |B_1|/|B_0|).
    for (double ratio : {0.1, 1.0, 2.5}) {
        UnitCellModel m(2, {spec_for(50.0, ratio)}, 1.0);
        CHECK(compute_betas(m).betas[0] ==
              doctest::Approx(50.0 * (1.0 + ratio)).epsilon(1e-12));
    }
}

TEST_CASE("chamber-coupling matrix structure") {
    UnitCellModel single(2, {spec_for(1.0, 1.0)}, 1.0);
    WeightedMatrix w = neumann_limit_matrix(single);
    CHECK(w.dim() == 2);
    CHECK(w.entries(0, 0) == 1.0);
    CHECK(w.entries(0, 1) == -1.0);
    CHECK(w.entries(1, 0) == -1.0);
    CHECK(w.entries(1, 1) == 1.0);

    WeightedMatrix pair = neumann_limit_matrix(two_resonator_model(1.5, 0.5));
    CHECK(pair.entries(0, 0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(pair.entries(0, 1) == doctest::Approx(-1.5).epsilon(1e-14));
    CHECK(pair.entries(0, 2) == doctest::Approx(-1.5).epsilon(1e-14));
    CHECK(pair.entries(1, 0) == -1.0);
    CHECK(pair.entries(1, 1) == 1.0);
    CHECK(pair.entries(1, 2) == 0.0);
    CHECK(pair.entries(2, 0) == -3.0);
    CHECK(pair.entries(2, 1) == 0.0);
    CHECK(pair.entries(2, 2) == 3.0);
    CHECK(pair.weighted_symmetry_defect() <= 4e-16);
}

TEST_CASE("matrix spectrum equals {0} union betas") {
    WeightedMatrix w = neumann_limit_matrix(
        UnitCellModel(2, {spec_for(1.0, 1.0)}, 1.0));
    auto vals = neumann_limit_eigenvalues(w);
    CHECK(vals[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(vals[1] == doctest::Approx(2.0).epsilon(1e-12));

    // |B| ratios (1.5, 1/6): spectrum (0, 2, 4).
    auto vals_a = neumann_limit_eigenvalues(
        neumann_limit_matrix(two_resonator_model(1.5, 1.0 / 6.0)));
    CHECK(vals_a[1] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(vals_a[2] == doctest::Approx(4.0).epsilon(1e-10));

    // |B| ratios (1.5, 0.5): characteristic polynomial lambda^2 - 7 lambda + 9,
    // spectrum (0, (7 - sqrt(13))/2, (7 + sqrt(13))/2). Cross-checked against
    // the root computation below.
    UnitCellModel model_b = two_resonator_model(1.5, 0.5);
    auto vals_b = neumann_limit_eigenvalues(neumann_limit_matrix(model_b));
    const double r = std::sqrt(13.0);
    CHECK(vals_b[1] == doctest::Approx((7.0 - r) / 2.0).epsilon(1e-10));
    CHECK(vals_b[2] == doctest::Approx((7.0 + r) / 2.0).epsilon(1e-10));
    GapReport betas_b = compute_betas(model_b);
    CHECK(vals_b[1] == doctest::Approx(betas_b.betas[0]).epsilon(1e-10));
    CHECK(vals_b[2] == doctest::Approx(betas_b.betas[1]).epsilon(1e-10));
}

TEST_CASE("dirichlet limit spectrum is the sorted alphas") {
    UnitCellModel model(2, {spec_for(3.0, 0.5), spec_for(1.0, 1.5)}, 1.0);
    auto vals = dirichlet_limit_eigenvalues(model);
    CHECK(vals[0] == doctest::Approx(1.0));
    CHECK(vals[1] == doctest::Approx(3.0));

    UnitCellModel single(2, {spec_for(50.0, 1.0)}, 1.0);
    CHECK(dirichlet_limit_eigenvalues(single)[0] == doctest::Approx(50.0));
}

TEST_CASE("maxwell frequency gaps") {
    GapReport unit{{1.0}, {2.0}, {}};
    auto gaps = maxwell_gaps(unit);
    REQUIRE(gaps.size() == 2);
    CHECK(gaps[0].lo == doctest::Approx(-std::sqrt(2.0)));
    CHECK(gaps[0].hi == doctest::Approx(-1.0));
    CHECK(gaps[1].lo == doctest::Approx(1.0));
    CHECK(gaps[1].hi == doctest::Approx(std::sqrt(2.0)));

    GapReport squares{{4.0}, {9.0}, {}};
    auto gaps_sq = maxwell_gaps(squares);
    CHECK(gaps_sq[0].lo == doctest::Approx(-3.0));
    CHECK(gaps_sq[0].hi == doctest::Approx(-2.0));
    CHECK(gaps_sq[1].lo == doctest::Approx(2.0));
    CHECK(gaps_sq[1].hi == doctest::Approx(3.0));

    GapReport pair = compute_betas(two_resonator_model(1.5, 1.0 / 6.0));
    auto gaps4 = maxwell_gaps(pair);
    REQUIRE(gaps4.size() == 4);
    for (std::size_t i = 0; i + 1 < gaps4.size(); ++i) {
        CHECK(gaps4[i].lo < gaps4[i + 1].lo);
        CHECK(gaps4[i].hi < gaps4[i + 1].lo + 1e-12);
    }
}

TEST_CASE("interlacing, residuals and the matrix oracle on random models") {
    std::mt19937_64 rng(12345);
    for (int trial = 0; trial < 300; ++trial) {
        int m = 1 + static_cast<int>(rng() % 8);
        int n = 2 + static_cast<int>(rng() % 2);
        auto model = resgap::testing::random_model(rng, m, n);
        GapReport report = compute_betas(model);

        const auto& alphas = model.alphas_sorted();
        for (int j = 0; j < m; ++j) {
            CHECK(alphas[j] < report.betas[j]);
            if (j + 1 < m) CHECK(report.betas[j] < alphas[j + 1]);
            double residual = gap_function(model, report.betas[j]);
            double slope = gap_function_derivative(model, report.betas[j]);
            CHECK(std::abs(residual) <= 1e-10 * (1.0 + std::abs(slope)));
        }

        auto spectrum = neumann_limit_eigenvalues(neumann_limit_matrix(model));
        CHECK(std::abs(spectrum[0]) <= 1e-10);
        for (int j = 0; j < m; ++j) {
            CHECK(std::abs(spectrum[j + 1] - report.betas[j]) <= 1e-9 * report.betas[j]);
        }
    }
}

TEST_CASE("gap function is increasing between poles with the stated signs") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        int m = 1 + static_cast<int>(rng() % 6);
        auto model = resgap::testing::random_model(rng, m);
        const auto& alphas = model.alphas_sorted();
        double tail = alphas.back() + 1.0;
        for (int j = 0; j < m; ++j) {
            double lo = alphas[j];
            double hi = (j + 1 < m) ? alphas[j + 1] : alphas[j] + tail;
            double gap = hi - lo;
            CHECK(gap_function(model, lo + 1e-6 * gap) < 0.0);
            if (j + 1 < m) CHECK(gap_function(model, hi - 1e-6 * gap) > 0.0);

            double prev = gap_function(model, lo + 1e-4 * gap);
            for (int s = 1; s <= 5; ++s) {
                double x = lo + (1e-4 + s * 0.19) * gap;
                if (x >= hi) break;
                double cur = gap_function(model, x);
                CHECK(cur > prev);
                prev = cur;
            }
            CHECK(gap_function_derivative(model, lo + 0.5 * gap) > 0.0);
        }
    }
}

TEST_CASE("joint rescaling of volumes and profile measures fixes the spectrum") {
    std::mt19937_64 rng(2024);
    auto model = resgap::testing::random_model(rng, 4);
    GapReport base = compute_betas(model);

    auto rescaled = [&](double c) {
        std::vector<ResonatorSpec> specs = model.resonators();
        for (auto& s : specs) {
            s.b_volume *= c;
            s.d_profile_measure *= c;
        }
        return UnitCellModel(model.dimension(), std::move(specs),
                             model.b0_volume() * c);
    };

    for (double c : {0.5, 2.0, 8.0}) {  // powers of two: exact arithmetic
        GapReport scaled = compute_betas(rescaled(c));
        for (std::size_t j = 0; j < base.betas.size(); ++j) {
            CHECK(scaled.alphas[j] == base.alphas[j]);
            CHECK(scaled.betas[j] == base.betas[j]);
        }
    }
    GapReport scaled = compute_betas(rescaled(3.0));
    for (std::size_t j = 0; j < base.betas.size(); ++j) {
        CHECK(scaled.alphas[j] == doctest::Approx(base.alphas[j]).epsilon(1e-12));
        CHECK(scaled.betas[j] == doctest::Approx(base.betas[j]).epsilon(1e-12));
    }
}

TEST_CASE("root finder rejects an unbracketed interval") {
    auto f = [](double x) { return x * x + 1.0; };  // no real root
    auto df = [](double x) { return 2.0 * x; };
    CHECK_THROWS_AS(resgap::detail::find_bracketed_root(f, df, -1.0, 1.0),
                    RootNotBracketed);
}

TEST_CASE("gap report validation") {
    GapReport bad{{1.0, 3.0}, {2.0, 2.5}, {}};  // beta_2 < alpha_2
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    GapReport good{{1.0, 3.0}, {2.0, 4.0}, {}};
    CHECK_NOTHROW(good.validate());
}
