#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "centerdepth/camera.hpp"
#include "centerdepth/errors.hpp"
#include "centerdepth/heatmap.hpp"

namespace centerdepth::bev {

/// Obstacle on the ground plane of the ego camera frame: x lateral, z forward.
struct GroundPoint {
    double x{0.0};
    double z{0.0};
    double radius{0.0};
};

/// Camera-frame back-projection of the detection center with the vertical axis
/// dropped; footprint radius is half the box width at that depth.
inline GroundPoint detection_to_bev(const Detection& det, double depth,
                                    const CameraIntrinsics& k) {
    const CameraPoint p = back_project({det.u, det.v, depth}, k);
    return {p.p.x(), p.p.z(), det.w * depth / (2.0 * k.fx)};
}

struct GridSpec {
    double resolution{0.5};  ///< meters per cell
    double x_min{-20.0};
    double x_max{20.0};
    double z_min{0.0};
    double z_max{60.0};
    double inflation{0.5};  ///< added to every footprint radius

    int cols() const { return static_cast<int>(std::ceil((x_max - x_min) / resolution - 1e-9)); }
    int rows() const { return static_cast<int>(std::ceil((z_max - z_min) / resolution - 1e-9)); }

    void validate() const {
        if (!(resolution > 0)) throw Error(Errc::ValidationFailure, "resolution > 0");
        if (!(x_max > x_min)) throw Error(Errc::ValidationFailure, "x_max > x_min");
        if (!(z_max > z_min)) throw Error(Errc::ValidationFailure, "z_max > z_min");
        if (!(inflation >= 0)) throw Error(Errc::ValidationFailure, "inflation >= 0");
    }
};

/// col indexes x, row indexes z.
struct Cell {
    int col{0};
    int row{0};

    friend bool operator==(const Cell&, const Cell&) = default;
};

class OccupancyGrid {
public:
    OccupancyGrid() = default;
    explicit OccupancyGrid(const GridSpec& spec)
        : spec_(spec), cols_(spec.cols()), rows_(spec.rows()),
          cells_(static_cast<std::size_t>(cols_) * rows_, 0) {}

    /// Plain grid with unit resolution, used for planning tests.
    OccupancyGrid(int cols, int rows)
        : spec_{1.0, 0.0, static_cast<double>(cols), 0.0, static_cast<double>(rows), 0.0},
          cols_(cols), rows_(rows), cells_(static_cast<std::size_t>(cols) * rows, 0) {}

    const GridSpec& spec() const noexcept { return spec_; }
    int cols() const noexcept { return cols_; }
    int rows() const noexcept { return rows_; }

    bool inside(Cell c) const noexcept {
        return c.col >= 0 && c.row >= 0 && c.col < cols_ && c.row < rows_;
    }
    std::size_t index(Cell c) const noexcept {
        return static_cast<std::size_t>(c.row) * cols_ + c.col;
    }
    bool occupied(Cell c) const noexcept { return cells_[index(c)] != 0; }
    void set(Cell c, bool occ = true) noexcept { cells_[index(c)] = occ ? 1 : 0; }

    double center_x(int col) const noexcept { return spec_.x_min + (col + 0.5) * spec_.resolution; }
    double center_z(int row) const noexcept { return spec_.z_min + (row + 0.5) * spec_.resolution; }

    std::optional<Cell> cell_of(double x, double z) const noexcept {
        const Cell c{static_cast<int>(std::floor((x - spec_.x_min) / spec_.resolution)),
                     static_cast<int>(std::floor((z - spec_.z_min) / spec_.resolution))};
        if (!inside(c)) return std::nullopt;
        return c;
    }

    std::size_t occupied_count() const noexcept {
        return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 1));
    }

    friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

private:
    GridSpec spec_{};
    int cols_{0};
    int rows_{0};
    std::vector<std::uint8_t> cells_;
};

/// Marks every cell whose center is within footprint radius + inflation of a point.
inline OccupancyGrid rasterize_obstacles(std::span<const GroundPoint> points,
                                         const GridSpec& spec) {
    spec.validate();
    OccupancyGrid grid(spec);
    for (const auto& p : points) {
        const double reach = p.radius + spec.inflation;
        const int c0 = std::max(0, static_cast<int>(std::floor((p.x - reach - spec.x_min) / spec.resolution)) - 1);
        const int c1 = std::min(grid.cols() - 1, static_cast<int>(std::ceil((p.x + reach - spec.x_min) / spec.resolution)) + 1);
        const int r0 = std::max(0, static_cast<int>(std::floor((p.z - reach - spec.z_min) / spec.resolution)) - 1);
        const int r1 = std::min(grid.rows() - 1, static_cast<int>(std::ceil((p.z + reach - spec.z_min) / spec.resolution)) + 1);
        for (int r = r0; r <= r1; ++r) {
            for (int c = c0; c <= c1; ++c) {
                const double dx = grid.center_x(c) - p.x;
                const double dz = grid.center_z(r) - p.z;
                if (std::hypot(dx, dz) <= reach) grid.set({c, r});
            }
        }
    }
    return grid;
}

struct PlannedPath {
    std::vector<Cell> cells;  ///< start to goal inclusive
    double cost{0.0};         ///< in cells: 1 per straight step, sqrt(2) per diagonal
    double length{0.0};       ///< meters
};

/// Octile distance; admissible and consistent for 8-connected unit/√2 moves.
inline double octile(Cell a, Cell b) {
    const double dx = std::abs(a.col - b.col);
    const double dy = std::abs(a.row - b.row);
    return std::max(dx, dy) + (std::numbers::sqrt2 - 1.0) * std::min(dx, dy);
}

/// 8-connected A*. A diagonal move is allowed only when both orthogonal cells it
/// passes between are free, so paths never cut obstacle corners.
inline PlannedPath astar(const OccupancyGrid& grid, Cell start, Cell goal) {
    if (!grid.inside(start) || grid.occupied(start))
        throw Error(Errc::InvalidEndpoint, "start cell is outside the grid or occupied");
    if (!grid.inside(goal) || grid.occupied(goal))
        throw Error(Errc::InvalidEndpoint, "goal cell is outside the grid or occupied");

    const std::size_t n = static_cast<std::size_t>(grid.cols()) * grid.rows();
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> g(n, kInf);
    std::vector<std::int64_t> parent(n, -1);
    std::vector<std::uint8_t> closed(n, 0);

    using Entry = std::tuple<double, double, std::size_t>;  // f, h, index
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    const std::size_t s = grid.index(start);
    const std::size_t t = grid.index(goal);
    g[s] = 0.0;
    open.emplace(octile(start, goal), octile(start, goal), s);

    static constexpr int kDc[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr int kDr[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    while (!open.empty()) {
        const auto [f, h, u] = open.top();
        open.pop();
        if (closed[u]) continue;
        closed[u] = 1;
        if (u == t) break;
        const Cell cu{static_cast<int>(u % grid.cols()), static_cast<int>(u / grid.cols())};
        for (int k = 0; k < 8; ++k) {
            const Cell cv{cu.col + kDc[k], cu.row + kDr[k]};
            if (!grid.inside(cv) || grid.occupied(cv)) continue;
            const bool diagonal = kDc[k] != 0 && kDr[k] != 0;
            if (diagonal && (grid.occupied({cu.col + kDc[k], cu.row}) ||
                             grid.occupied({cu.col, cu.row + kDr[k]})))
                continue;
            const std::size_t v = grid.index(cv);
            if (closed[v]) continue;
            const double cand = g[u] + (diagonal ? std::numbers::sqrt2 : 1.0);
            if (cand < g[v]) {
                g[v] = cand;
                parent[v] = static_cast<std::int64_t>(u);
                const double hv = octile(cv, goal);
                open.emplace(cand + hv, hv, v);
            }
        }
    }
    if (!closed[t]) throw Error(Errc::Unreachable, "goal is not reachable from start");

    PlannedPath path;
    for (std::int64_t i = static_cast<std::int64_t>(t); i >= 0; i = parent[i])
        path.cells.push_back({static_cast<int>(i % grid.cols()), static_cast<int>(i / grid.cols())});
    std::reverse(path.cells.begin(), path.cells.end());
    path.cost = g[t];
    path.length = g[t] * grid.spec().resolution;
    return path;
}

inline nlohmann::json to_json(const OccupancyGrid& grid) {
    nlohmann::json occ = nlohmann::json::array();
    for (int r = 0; r < grid.rows(); ++r)
        for (int c = 0; c < grid.cols(); ++c)
            if (grid.occupied({c, r})) occ.push_back({c, r});
    const auto& s = grid.spec();
    return {{"resolution", s.resolution}, {"x_min", s.x_min},   {"x_max", s.x_max},
            {"z_min", s.z_min},           {"z_max", s.z_max},   {"inflation", s.inflation},
            {"cols", grid.cols()},        {"rows", grid.rows()}, {"occupied", std::move(occ)}};
}

inline nlohmann::json to_json(const PlannedPath& path, const OccupancyGrid& grid) {
    nlohmann::json cells = nlohmann::json::array();
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& c : path.cells) {
        cells.push_back({c.col, c.row});
        pts.push_back({grid.center_x(c.col), grid.center_z(c.row)});
    }
    return {{"cost", path.cost}, {"length_m", path.length}, {"cells", std::move(cells)},
            {"points_m", std::move(pts)}};
}

}  // namespace centerdepth::bev
