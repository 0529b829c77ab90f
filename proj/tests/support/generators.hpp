#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "resgap/inverse_design.hpp"
#include "resgap/limit_model.hpp"

namespace resgap::testing {

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(std::log(lo), std::log(hi));
    return std::exp(dist(rng));
}

// Random valid model with parameters log-uniform in [0.25, 4]. Alphas are kept
// at least 5e-3 apart in relative terms; closer poles push the root residual
// past what double precision can certify at the pinned tolerances.
inline UnitCellModel random_model(std::mt19937_64& rng, int m, int n = 2) {
    for (int attempt = 0; attempt < 500; ++attempt) {
        std::vector<ResonatorSpec> specs(m);
        for (auto& s : specs) {
            s.h = log_uniform(rng, 0.25, 4.0);
            s.eta = log_uniform(rng, 0.25, 4.0);
            s.d_profile_measure = log_uniform(rng, 0.25, 4.0);
            s.b_volume = log_uniform(rng, 0.25, 4.0);
        }
        std::vector<double> alphas(m);
        for (int j = 0; j < m; ++j) alphas[j] = specs[j].alpha(n);
        std::sort(alphas.begin(), alphas.end());
        bool separated = true;
        for (int j = 0; j + 1 < m; ++j) {
            if (alphas[j + 1] - alphas[j] <= 5e-3 * alphas[j + 1]) separated = false;
        }
        if (!separated) continue;
        return UnitCellModel(n, std::move(specs), log_uniform(rng, 0.25, 4.0));
    }
    throw std::runtime_error("failed to draw a well-separated random model");
}

// Random interlaced targets: 2m endpoints log-uniform in [1e-2, 1e2], sorted,
// consecutive values at least 1e-3 apart relatively, split alternately into
// (alpha_j, beta_j).
inline TargetGaps random_targets(std::mt19937_64& rng, int m) {
    for (int attempt = 0; attempt < 500; ++attempt) {
        std::vector<double> points(2 * m);
        for (auto& p : points) p = log_uniform(rng, 1e-2, 1e2);
        std::sort(points.begin(), points.end());
        bool separated = true;
        for (std::size_t i = 0; i + 1 < points.size(); ++i) {
            if (points[i + 1] - points[i] <= 1e-3 * points[i + 1]) separated = false;
        }
        if (!separated) continue;
        TargetGaps targets;
        for (int j = 0; j < m; ++j) {
            targets.alphas.push_back(points[2 * j]);
            targets.betas.push_back(points[2 * j + 1]);
        }
        return targets;
    }
    throw std::runtime_error("failed to draw well-separated random targets");
}

}  // namespace resgap::testing
