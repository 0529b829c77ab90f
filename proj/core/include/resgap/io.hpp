#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "resgap/band_solver.hpp"
#include "resgap/inverse_design.hpp"
#include "resgap/limit_model.hpp"

namespace resgap {

// JSON wire formats:
//   UnitCellModel  {"n":int, "b0_volume":x, "resonators":[{"h","eta",
//                   "d_profile_measure","b_volume"}, ...]}
//   GapReport      {"alphas":[...], "betas":[...], "lambda_cap":x|null}
//   TargetGaps     {"alphas":[...], "betas":[...]}
//   CellGeometry2D {"rects_F":[{"x0","y0","x1","y1"},...], "rects_B":[...],
//                   "passages":[{"zx","zy","h","eta","d"},...], "b0_area":x}
// Parse failures throw ValidationError with the offending key in the message.

nlohmann::json to_json(const UnitCellModel& model);
nlohmann::json to_json(const GapReport& report);
nlohmann::json to_json(const TargetGaps& targets);
nlohmann::json to_json(const CellGeometry2D& geometry);

UnitCellModel model_from_json(const nlohmann::json& j);
GapReport report_from_json(const nlohmann::json& j);
TargetGaps targets_from_json(const nlohmann::json& j);
CellGeometry2D geometry_from_json(const nlohmann::json& j);

nlohmann::json load_json(const std::string& path);
void save_json(const nlohmann::json& j, const std::string& path);

// CSV artifacts (17 significant digits, one header line).
// bands.csv: theta_x,theta_y,k,lambda,residual
void write_bands_csv(const BandSweep& sweep, const std::string& path);
// gaps.csv: k,gap_lo,gap_hi,limit_alpha,limit_beta,rel_dev
void write_gaps_csv(const BandSweep& sweep, const std::vector<double>& limit_alphas,
                    const std::vector<double>& limit_betas, const std::string& path);
// study.csv: epsilon,grid_n,kind,index,value,limit,rel_dev
void write_study_csv(const StudyTable& table, const std::string& path);

}  // namespace resgap
