#include "resgap/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <string>

namespace resgap {

namespace {

struct PassageSpan {
    int col_lo = 0, col_hi = 0;  // inclusive column range
    double y_lo = 0.0, y_hi = 0.0;
};

void check_connected(const RasterCell& cell) {
    const int n = cell.grid_n;
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(n) * n, 0);
    std::size_t total = cell.fluid_count();
    if (total == 0) throw ValidationError("raster has no fluid cells");

    std::size_t start = 0;
    while (cell.mask[start] == 0) ++start;
    std::queue<std::size_t> queue;
    queue.push(start);
    seen[start] = 1;
    std::size_t reached = 1;
    while (!queue.empty()) {
        std::size_t p = queue.front();
        queue.pop();
        int ix = static_cast<int>(p % n), iy = static_cast<int>(p / n);
        const int dx[4] = {1, -1, 0, 0};
        const int dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            int jx = ix + dx[k], jy = iy + dy[k];
            if (jx < 0 || jy < 0 || jx >= n || jy >= n) continue;
            std::size_t q = static_cast<std::size_t>(jy) * n + jx;
            if (cell.mask[q] && !seen[q]) {
                seen[q] = 1;
                ++reached;
                queue.push(q);
            }
        }
    }
    if (reached != total) {
        throw ValidationError("fluid region is disconnected (" +
                              std::to_string(reached) + " of " + std::to_string(total) +
                              " cells reachable)");
    }
}

}  // namespace

std::size_t RasterCell::fluid_count() const {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
}

double RasterCell::fluid_area() const {
    return static_cast<double>(fluid_count()) / (static_cast<double>(grid_n) * grid_n);
}

RasterCell rasterize(const CellGeometry2D& geometry, double epsilon, int grid_n) {
    geometry.validate();
    if (grid_n < 8) throw ValidationError("grid_n too small");
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");

    RasterCell cell;
    cell.grid_n = grid_n;
    cell.epsilon = epsilon;
    cell.geometry = geometry;
    cell.mask.assign(static_cast<std::size_t>(grid_n) * grid_n, 1);

    const std::size_t m = geometry.resonator_count();
    std::vector<PassageSpan> spans(m);
    cell.passage_width_cells.resize(m);
    cell.snapped_etas.resize(m);

    for (std::size_t j = 0; j < m; ++j) {
        const Passage& p = geometry.passages[j];
        const double width = p.eta * epsilon * epsilon;
        if (width > p.d) {
            throw PassageExceedsClearance(
                "passage width eta*eps^2 = " + std::to_string(width) +
                " exceeds clearance d = " + std::to_string(p.d) + " at resonator " +
                std::to_string(j));
        }
        const int cells = static_cast<int>(std::lround(width * grid_n));
        if (cells < 3) {
            throw UnresolvedPassage("passage " + std::to_string(j) + " spans " +
                                    std::to_string(cells) +
                                    " grid cells; need >= 3 (refine grid_n or grow eps)");
        }
        // Snap to whole columns centered on the passage axis.
        int col_lo = static_cast<int>(std::lround(p.zx * grid_n - 0.5 * cells));
        spans[j] = {col_lo, col_lo + cells - 1, p.zy - 0.5 * p.h, p.zy + 0.5 * p.h};
        cell.passage_width_cells[j] = cells;
        cell.snapped_etas[j] =
            static_cast<double>(cells) / (grid_n * epsilon * epsilon);
    }

    const double h = 1.0 / grid_n;
    for (int iy = 0; iy < grid_n; ++iy) {
        const double y = (iy + 0.5) * h;
        for (int ix = 0; ix < grid_n; ++ix) {
            const double x = (ix + 0.5) * h;
            for (std::size_t j = 0; j < m; ++j) {
                if (!geometry.rects_f[j].contains(x, y)) continue;
                bool fluid = geometry.rects_b[j].contains(x, y) ||
                             (ix >= spans[j].col_lo && ix <= spans[j].col_hi &&
                              y >= spans[j].y_lo && y <= spans[j].y_hi);
                if (!fluid) {
                    cell.mask[static_cast<std::size_t>(iy) * grid_n + ix] = 0;
                }
                break;  // shells are disjoint
            }
        }
    }

    check_connected(cell);
    return cell;
}

RasterCell rasterize_outer(const CellGeometry2D& geometry, int grid_n) {
    geometry.validate();
    if (grid_n < 8) throw ValidationError("grid_n too small");

    RasterCell cell;
    cell.grid_n = grid_n;
    cell.epsilon = 1.0;
    cell.geometry = geometry;
    cell.mask.assign(static_cast<std::size_t>(grid_n) * grid_n, 1);

    const double h = 1.0 / grid_n;
    for (int iy = 0; iy < grid_n; ++iy) {
        const double y = (iy + 0.5) * h;
        for (int ix = 0; ix < grid_n; ++ix) {
            const double x = (ix + 0.5) * h;
            for (const Rect& f : geometry.rects_f) {
                if (x >= f.x0 && x <= f.x1 && y >= f.y0 && y <= f.y1) {
                    cell.mask[static_cast<std::size_t>(iy) * grid_n + ix] = 0;
                    break;
                }
            }
        }
    }

    check_connected(cell);
    return cell;
}

void write_pgm(const RasterCell& cell, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open " + path + " for writing");
    out << "P5\n" << cell.grid_n << " " << cell.grid_n << "\n255\n";
    // Top image row = top of the cell (largest y).
    for (int iy = cell.grid_n - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < cell.grid_n; ++ix) {
            out.put(cell.fluid(ix, iy) ? static_cast<char>(255) : static_cast<char>(0));
        }
    }
    if (!out) throw ValidationError("failed writing " + path);
}

}  // namespace resgap
