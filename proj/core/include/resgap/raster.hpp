#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "resgap/inverse_design.hpp"

namespace resgap {

// Cell-centered raster of the perforated period cell at perforation scale
// epsilon. A cell is fluid when its center lies in B_0, a chamber B_j, or a
// passage. Passage widths are snapped to whole grid columns (>= 3); the
// snapped eta values are recorded and should be used wherever the raster is
// compared against the limit model.
struct RasterCell {
    int grid_n = 0;
    double epsilon = 0.0;
    std::vector<std::uint8_t> mask;  // row-major y*grid_n + x, 1 = fluid
    CellGeometry2D geometry;
    std::vector<int> passage_width_cells;
    std::vector<double> snapped_etas;

    bool fluid(int ix, int iy) const {
        return mask[static_cast<std::size_t>(iy) * grid_n + ix] != 0;
    }
    std::size_t fluid_count() const;
    double fluid_area() const;  // fluid_count / grid_n^2
};

RasterCell rasterize(const CellGeometry2D& geometry, double epsilon, int grid_n);

// Raster of the outer region B_0 alone (everything inside any shell closure is
// solid); used for the spectral cutoff estimate. epsilon is fixed to 1.
RasterCell rasterize_outer(const CellGeometry2D& geometry, int grid_n);

// Binary PGM (P5), fluid = 255, solid = 0.
void write_pgm(const RasterCell& cell, const std::string& path);

}  // namespace resgap
