#include "resgap/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace resgap {

namespace {

using nlohmann::json;

double get_number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw ValidationError(std::string("expected numeric field \"") + key + "\"");
    }
    return j[key].get<double>();
}

std::vector<double> get_number_list(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array()) {
        throw ValidationError(std::string("expected array field \"") + key + "\"");
    }
    std::vector<double> out;
    out.reserve(j[key].size());
    for (const auto& v : j[key]) {
        if (!v.is_number()) {
            throw ValidationError(std::string("non-numeric entry in \"") + key + "\"");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

json rect_to_json(const Rect& r) {
    return json{{"x0", r.x0}, {"y0", r.y0}, {"x1", r.x1}, {"y1", r.y1}};
}

Rect rect_from_json(const json& j) {
    return Rect{get_number(j, "x0"), get_number(j, "y0"), get_number(j, "x1"),
                get_number(j, "y1")};
}

std::ofstream open_csv(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open " + path + " for writing");
    out << std::setprecision(17);
    return out;
}

}  // namespace

json to_json(const UnitCellModel& model) {
    json resonators = json::array();
    for (const auto& r : model.resonators()) {
        resonators.push_back(json{{"h", r.h},
                                  {"eta", r.eta},
                                  {"d_profile_measure", r.d_profile_measure},
                                  {"b_volume", r.b_volume}});
    }
    return json{{"n", model.dimension()},
                {"b0_volume", model.b0_volume()},
                {"resonators", std::move(resonators)}};
}

json to_json(const GapReport& report) {
    json j{{"alphas", report.alphas}, {"betas", report.betas}};
    if (report.lambda_cap) {
        j["lambda_cap"] = *report.lambda_cap;
    } else {
        j["lambda_cap"] = nullptr;
    }
    return j;
}

json to_json(const TargetGaps& targets) {
    return json{{"alphas", targets.alphas}, {"betas", targets.betas}};
}

json to_json(const CellGeometry2D& geometry) {
    json rects_f = json::array(), rects_b = json::array(), passages = json::array();
    for (const auto& r : geometry.rects_f) rects_f.push_back(rect_to_json(r));
    for (const auto& r : geometry.rects_b) rects_b.push_back(rect_to_json(r));
    for (const auto& p : geometry.passages) {
        passages.push_back(json{
            {"zx", p.zx}, {"zy", p.zy}, {"h", p.h}, {"eta", p.eta}, {"d", p.d}});
    }
    return json{{"rects_F", std::move(rects_f)},
                {"rects_B", std::move(rects_b)},
                {"passages", std::move(passages)},
                {"b0_area", geometry.b0_area}};
}

UnitCellModel model_from_json(const json& j) {
    if (!j.contains("n") || !j["n"].is_number_integer()) {
        throw ValidationError("expected integer field \"n\"");
    }
    if (!j.contains("resonators") || !j["resonators"].is_array()) {
        throw ValidationError("expected array field \"resonators\"");
    }
    std::vector<ResonatorSpec> specs;
    specs.reserve(j["resonators"].size());
    for (const auto& rj : j["resonators"]) {
        ResonatorSpec spec;
        spec.h = get_number(rj, "h");
        spec.eta = get_number(rj, "eta");
        spec.d_profile_measure = get_number(rj, "d_profile_measure");
        spec.b_volume = get_number(rj, "b_volume");
        specs.push_back(spec);
    }
    return UnitCellModel(j["n"].get<int>(), std::move(specs), get_number(j, "b0_volume"));
}

GapReport report_from_json(const json& j) {
    GapReport report;
    report.alphas = get_number_list(j, "alphas");
    report.betas = get_number_list(j, "betas");
    if (j.contains("lambda_cap") && j["lambda_cap"].is_number()) {
        report.lambda_cap = j["lambda_cap"].get<double>();
    }
    report.validate();
    return report;
}

TargetGaps targets_from_json(const json& j) {
    TargetGaps targets;
    targets.alphas = get_number_list(j, "alphas");
    targets.betas = get_number_list(j, "betas");
    targets.validate();
    return targets;
}

CellGeometry2D geometry_from_json(const json& j) {
    for (const char* key : {"rects_F", "rects_B", "passages"}) {
        if (!j.contains(key) || !j[key].is_array()) {
            throw ValidationError(std::string("expected array field \"") + key + "\"");
        }
    }
    CellGeometry2D geom;
    for (const auto& rj : j["rects_F"]) geom.rects_f.push_back(rect_from_json(rj));
    for (const auto& rj : j["rects_B"]) geom.rects_b.push_back(rect_from_json(rj));
    for (const auto& pj : j["passages"]) {
        Passage p;
        p.zx = get_number(pj, "zx");
        p.zy = get_number(pj, "zy");
        p.h = get_number(pj, "h");
        p.eta = get_number(pj, "eta");
        p.d = get_number(pj, "d");
        geom.passages.push_back(p);
    }
    geom.b0_area = get_number(j, "b0_area");
    geom.validate();
    return geom;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ValidationError("JSON parse error in " + path + ": " + e.what());
    }
    return j;
}

void save_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

void write_bands_csv(const BandSweep& sweep, const std::string& path) {
    auto out = open_csv(path);
    out << "theta_x,theta_y,k,lambda,residual\n";
    for (std::size_t i = 0; i < sweep.slices.size(); ++i) {
        const auto& slice = sweep.slices[i];
        for (std::size_t k = 0; k < slice.eigenvalues.size(); ++k) {
            out << sweep.theta_samples[i][0] << ',' << sweep.theta_samples[i][1] << ','
                << (k + 1) << ',' << slice.eigenvalues[k] << ',' << slice.residuals[k]
                << '\n';
        }
    }
}

void write_gaps_csv(const BandSweep& sweep, const std::vector<double>& limit_alphas,
                    const std::vector<double>& limit_betas, const std::string& path) {
    auto out = open_csv(path);
    out << "k,gap_lo,gap_hi,limit_alpha,limit_beta,rel_dev\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t g = 0; g < sweep.gaps.size(); ++g) {
        const auto& gap = sweep.gaps[g];
        double la = g < limit_alphas.size() ? limit_alphas[g] : nan;
        double lb = g < limit_betas.size() ? limit_betas[g] : nan;
        double dev = nan;
        if (!std::isnan(la) && !std::isnan(lb)) {
            dev = std::max(std::abs(gap.lo - la) / la, std::abs(gap.hi - lb) / lb);
        }
        out << gap.k << ',' << gap.lo << ',' << gap.hi << ',' << la << ',' << lb << ','
            << dev << '\n';
    }
}

void write_study_csv(const StudyTable& table, const std::string& path) {
    auto out = open_csv(path);
    out << "epsilon,grid_n,kind,index,value,limit,rel_dev\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& row : table.rows) {
        auto emit = [&](const char* kind, std::size_t index, double value, double limit,
                        double dev) {
            out << row.epsilon << ',' << row.grid_n << ',' << kind << ',' << index << ','
                << value << ',' << limit << ',' << dev << '\n';
        };
        for (std::size_t k = 0; k < row.lambda_neumann.size(); ++k) {
            double limit = k >= 1 ? table.limit_betas[k - 1] : nan;
            double dev = k >= 1 ? row.dev_neumann[k - 1] : nan;
            emit("lambda_neumann", k + 1, row.lambda_neumann[k], limit, dev);
        }
        for (std::size_t k = 0; k < row.lambda_dirichlet.size(); ++k) {
            emit("lambda_dirichlet", k + 1, row.lambda_dirichlet[k],
                 table.limit_alphas[k], row.dev_dirichlet[k]);
        }
        for (std::size_t g = 0; g < row.gaps.size(); ++g) {
            double la = g < table.limit_alphas.size() ? table.limit_alphas[g] : nan;
            double lb = g < table.limit_betas.size() ? table.limit_betas[g] : nan;
            double dla = g < row.dev_gap_lo.size() ? row.dev_gap_lo[g] : nan;
            double dlb = g < row.dev_gap_hi.size() ? row.dev_gap_hi[g] : nan;
            emit("gap_lo", g + 1, row.gaps[g].lo, la, dla);
            emit("gap_hi", g + 1, row.gaps[g].hi, lb, dlb);
        }
        emit("gap_count", 0, static_cast<double>(row.gap_count),
             static_cast<double>(table.limit_alphas.size()), nan);
        emit("cutoff", 0, row.cutoff, nan, nan);
    }
}

}  // namespace resgap
