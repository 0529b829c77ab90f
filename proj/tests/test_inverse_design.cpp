#include <doctest.h>

#include <cmath>
#include <random>

#include "resgap/inverse_design.hpp"
#include "support/generators.hpp"

using namespace resgap;

TEST_CASE("target validation") {
    TargetGaps good{{1.0, 3.0}, {2.0, 4.0}};
    CHECK_NOTHROW(good.validate());
    TargetGaps empty{{}, {}};
    CHECK_THROWS_AS(empty.validate(), ValidationError);
    TargetGaps reversed{{1.0}, {0.5}};
    CHECK_THROWS_AS(reversed.validate(), ValidationError);
    TargetGaps negative{{-1.0}, {2.0}};
    CHECK_THROWS_AS(negative.validate(), ValidationError);
    TargetGaps crossing{{1.0, 3.0}, {3.5, 4.0}};  // beta_1 > alpha_2
    CHECK_THROWS_AS(crossing.validate(), ValidationError);
}

TEST_CASE("closed-form rho on reference targets") {
    TargetGaps unit{{1.0}, {2.0}};
    CHECK(solve_rho_closed_form(unit)[0] == doctest::Approx(1.0).epsilon(1e-14));
    TargetGaps narrow{{50.0}, {60.0}};
    CHECK(solve_rho_closed_form(narrow)[0] == doctest::Approx(0.2).epsilon(1e-14));

    TargetGaps pair{{1.0, 3.0}, {2.0, 4.0}};
    auto rho = solve_rho_closed_form(pair);
    CHECK(rho[0] == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(rho[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("linear-system oracle agrees with the closed form") {
    {
        TargetGaps unit{{1.0}, {2.0}};
        auto rho = solve_rho_linear_system(unit);
        CHECK(rho[0] == doctest::Approx(1.0).epsilon(1e-12));
    }
    {
        TargetGaps t{{1.0, 3.0}, {2.0, 4.0}};
        auto rho = solve_rho_linear_system(t);
        CHECK(rho[0] == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(rho[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
        // Residual of the defining equations.
        for (std::size_t k = 0; k < 2; ++k) {
            double r = 1.0;
            for (std::size_t j = 0; j < 2; ++j) {
                r += rho[j] * t.alphas[j] / (t.alphas[j] - t.betas[k]);
            }
            CHECK(std::abs(r) < 1e-12);
        }
    }

    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        int m = 1 + static_cast<int>(rng() % 8);
        TargetGaps targets = resgap::testing::random_targets(rng, m);
        auto closed = solve_rho_closed_form(targets);
        auto linear = solve_rho_linear_system(targets);
        double scale = 0.0, dev = 0.0;
        for (int j = 0; j < m; ++j) {
            CHECK(closed[j] > 0.0);
            scale = std::max(scale, std::abs(closed[j]));
            dev = std::max(dev, std::abs(closed[j] - linear[j]));
        }
        CHECK(dev <= 1e-9 * scale);
    }
}

TEST_CASE("taus from rhos") {
    const std::vector<double> one{1.0};
    const std::vector<double> neg{-1.0};
    CHECK_THROWS_AS(compute_taus(one, 1.0), ValidationError);  // gamma = 1 rejected
    CHECK_THROWS_AS(compute_taus(one, 0.0), ValidationError);
    CHECK_THROWS_AS(compute_taus(neg, 0.5), ValidationError);

    const std::vector<double> pair_rhos{1.5, 1.0 / 6.0};
    auto taus = compute_taus(pair_rhos, 0.5);
    CHECK(taus[0] == doctest::Approx(18.0 / 23.0).epsilon(1e-14));
    CHECK(taus[1] == doctest::Approx(2.0 / 23.0).epsilon(1e-14));
    CHECK(taus[0] + taus[1] < 1.0);

    // rho recovered as tau * (gamma^n + sum rho).
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        int m = 1 + static_cast<int>(rng() % 6);
        std::vector<double> rhos(m);
        double sum = 0.0;
        for (auto& r : rhos) {
            r = resgap::testing::log_uniform(rng, 1e-2, 1e2);
            sum += r;
        }
        double gamma = 0.2 + 0.6 * (static_cast<double>(rng() % 1000) / 1000.0);
        auto t = compute_taus(rhos, gamma, 2);
        double total = 0.0;
        for (int j = 0; j < m; ++j) {
            CHECK(t[j] * (gamma * gamma + sum) ==
                  doctest::Approx(rhos[j]).epsilon(1e-12));
            CHECK(t[j] > 0.0);
            total += t[j];
        }
        CHECK(total < 1.0);
    }
}

TEST_CASE("single-resonator geometry realizes the worked numbers") {
    TargetGaps targets{{1.0}, {2.0}};
    CellGeometry2D geom = synthesize_geometry(targets, 0.5);
    REQUIRE(geom.resonator_count() == 1);

    // tau = 1/(0.25 + 1) = 0.8, |B| = 0.25 * 0.8 = 0.2, |B_0| = 0.2.
    CHECK(geom.rects_f[0].area() == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(geom.rects_b[0].area() == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(geom.b0_area == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(geom.rects_b[0].area() / geom.b0_area == doctest::Approx(1.0).epsilon(1e-12));

    // Square shell, vertical passage from chamber top to shell top.
    CHECK(geom.rects_f[0].width() == doctest::Approx(std::sqrt(0.8)).epsilon(1e-12));
    const Passage& p = geom.passages[0];
    CHECK(p.h == doctest::Approx(0.25 * std::sqrt(0.8)).epsilon(1e-12));
    CHECK(p.zy + 0.5 * p.h == doctest::Approx(geom.rects_f[0].y1).epsilon(1e-12));
    CHECK(p.zy - 0.5 * p.h == doctest::Approx(geom.rects_b[0].y1).epsilon(1e-12));
    CHECK(p.eta == doctest::Approx(1.0 * p.h * 0.2).epsilon(1e-12));
    CHECK(p.d > p.eta);
}

TEST_CASE("chamber/outer area ratio equals rho for synthesized geometry") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        int m = 1 + static_cast<int>(rng() % 3);
        TargetGaps targets = resgap::testing::random_targets(rng, m);
        auto rho = solve_rho_closed_form(targets);
        CellGeometry2D geom;
        try {
            geom = synthesize_geometry(targets, 0.5);
        } catch (const Error&) {
            continue;  // packing/clearance-infeasible draws are exercised elsewhere
        }
        for (int j = 0; j < m; ++j) {
            CHECK(geom.rects_b[j].area() / geom.b0_area ==
                  doctest::Approx(rho[j]).epsilon(1e-12));
        }
    }
}

TEST_CASE("roundtrip reproduces the targets for m up to 3 and several gammas") {
    std::vector<TargetGaps> cases = {
        TargetGaps{{1.0}, {2.0}},
        TargetGaps{{1.0, 3.0}, {2.0, 4.0}},
        TargetGaps{{1.0, 2.0, 4.0}, {1.2, 2.4, 4.8}},
    };
    for (const auto& targets : cases) {
        GapReport previous;
        for (double gamma : {0.3, 0.5, 0.7}) {
            CellGeometry2D geom = synthesize_geometry(targets, gamma);
            GapReport report = roundtrip_verify(geom, targets);
            for (std::size_t j = 0; j < targets.size(); ++j) {
                CHECK(std::abs(report.alphas[j] - targets.alphas[j]) <=
                      1e-9 * targets.alphas[j]);
                CHECK(std::abs(report.betas[j] - targets.betas[j]) <=
                      1e-9 * targets.betas[j]);
                if (!previous.betas.empty()) {  // gamma-independence of the limit
                    CHECK(std::abs(report.betas[j] - previous.betas[j]) <=
                          2e-9 * targets.betas[j]);
                }
            }
            previous = report;
        }
    }
}

TEST_CASE("perturbed geometry is rejected by the roundtrip") {
    TargetGaps targets{{1.0}, {2.0}};
    CellGeometry2D geom = synthesize_geometry(targets, 0.5);
    geom.passages[0].eta *= 1.01;
    CHECK_THROWS_AS(roundtrip_verify(geom, targets), RoundtripMismatch);
}

TEST_CASE("layout failure modes") {
    // Overly generous margin: the two shells cannot be packed.
    TargetGaps pair{{1.0, 3.0}, {2.0, 4.0}};
    CHECK_THROWS_AS(synthesize_geometry(pair, 0.3, 0.05), InfeasibleLayout);

    // Large target alpha: the clearance bound forces a shell wider than the
    // cell.
    TargetGaps hot{{30.0}, {60.0}};
    CHECK_THROWS_AS(synthesize_geometry(hot, 0.5), GammaTooLarge);

    CHECK_THROWS_AS(synthesize_geometry(pair, 1.2), ValidationError);
    CHECK_THROWS_AS(synthesize_geometry(pair, 0.5, -0.1), ValidationError);
}

TEST_CASE("non-positive rho is flagged when validation is bypassed") {
    TargetGaps broken;
    broken.alphas = {1.0, 3.0};
    broken.betas = {3.5, 4.0};  // beta_1 beyond alpha_2
    CHECK_THROWS(solve_rho_closed_form(broken));
}

TEST_CASE("design solution invariants") {
    TargetGaps targets{{1.0, 3.0}, {2.0, 4.0}};
    DesignSolution sol = solve_design(targets, 0.5);
    CHECK(sol.rhos[0] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(sol.taus[0] == doctest::Approx(18.0 / 23.0).epsilon(1e-12));
    CHECK(sol.etas.size() == 2);
    CHECK_NOTHROW(sol.validate());
}
