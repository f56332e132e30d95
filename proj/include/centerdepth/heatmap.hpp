#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "centerdepth/errors.hpp"
#include "centerdepth/object_class.hpp"
#include "centerdepth/raster.hpp"

namespace centerdepth {

/// Center-confidence map over an N x N cell grid. Cell (c, r) covers image
/// pixels around ((c + 0.5) * stride_x, (r + 0.5) * stride_y); strides differ
/// per axis when the image is not square.
struct Heatmap {
    Raster<float> values;
    double stride_x{1.0};
    double stride_y{1.0};

    Heatmap() = default;
    Heatmap(int cols, int rows, double sx, double sy)
        : values(cols, rows, 1, 0.0f), stride_x(sx), stride_y(sy) {}

    int cols() const noexcept { return values.width(); }
    int rows() const noexcept { return values.height(); }
    float at(int c, int r) const noexcept { return values.at(c, r); }

    double image_u(int c) const noexcept { return (c + 0.5) * stride_x; }
    double image_v(int r) const noexcept { return (r + 0.5) * stride_y; }

    Pixel cell_of(double u, double v) const noexcept {
        const int c = std::clamp(static_cast<int>(std::floor(u / stride_x)), 0, cols() - 1);
        const int r = std::clamp(static_cast<int>(std::floor(v / stride_y)), 0, rows() - 1);
        return {c, r};
    }

    friend bool operator==(const Heatmap&, const Heatmap&) = default;
};

inline double peak_sigma(double w_cells, double h_cells) {
    return std::max(1.0, std::min(w_cells, h_cells) / 6.0);
}

/// Max-splats an isotropic Gaussian with peak 1 at `center`; object size in cells.
inline void render_gaussian_peak(Heatmap& hm, Pixel center, double w_cells, double h_cells) {
    if (!hm.values.contains(center.x, center.y))
        throw Error(Errc::CenterOutOfBounds,
                    "peak (" + std::to_string(center.x) + "," + std::to_string(center.y) + ")");
    const double sigma = peak_sigma(w_cells, h_cells);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (int r = 0; r < hm.rows(); ++r) {
        const double dy = r - center.y;
        for (int c = 0; c < hm.cols(); ++c) {
            const double dx = c - center.x;
            const auto g = static_cast<float>(std::exp(-(dx * dx + dy * dy) * inv));
            float& cell = hm.values.at(c, r);
            cell = std::max(cell, g);
        }
    }
}

struct Peak {
    Pixel cell;
    float score{0.0f};

    friend bool operator==(const Peak&, const Peak&) = default;
};

/// Local maxima of a `window` x `window` neighbourhood scoring at least `threshold`.
/// Plateaus resolve to the smallest row-major index. Sorted by descending score,
/// then ascending index.
inline std::vector<Peak> extract_peaks(const Heatmap& hm, float threshold, int window) {
    if (window < 3 || window % 2 == 0)
        throw Error(Errc::InvalidArgument, "window must be odd and >= 3");
    const int half = window / 2;
    const int cols = hm.cols();
    const int rows = hm.rows();
    std::vector<Peak> peaks;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const float v = hm.at(c, r);
            if (!(v >= threshold)) continue;
            const long idx = static_cast<long>(r) * cols + c;
            bool is_peak = true;
            for (int dr = -half; dr <= half && is_peak; ++dr) {
                for (int dc = -half; dc <= half; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    const int rr = r + dr, cc = c + dc;
                    if (rr < 0 || cc < 0 || rr >= rows || cc >= cols) continue;
                    const float w = hm.at(cc, rr);
                    const long widx = static_cast<long>(rr) * cols + cc;
                    if (w > v || (w == v && widx < idx)) {
                        is_peak = false;
                        break;
                    }
                }
            }
            if (is_peak) peaks.push_back({{c, r}, v});
        }
    }
    std::stable_sort(peaks.begin(), peaks.end(),
                     [](const Peak& a, const Peak& b) { return a.score > b.score; });
    return peaks;
}

/// Integer-lattice region |x - x_c| <= w/2, |y - y_c| <= h/2 clipped to the image.
/// The center is the pixel nearest to the continuous detection center.
class Region {
public:
    Region(double u, double v, double w, double h, int image_width, int image_height)
        : center_{static_cast<int>(std::lround(u)), static_cast<int>(std::lround(v))},
          w_(w), h_(h), image_width_(image_width), image_height_(image_height) {
        if (center_.x < 0 || center_.y < 0 || center_.x >= image_width ||
            center_.y >= image_height)
            throw Error(Errc::CenterOutOfBounds, "region center (" + std::to_string(u) + "," +
                                                     std::to_string(v) + ") outside image");
        if (!(w >= 0.0) || !(h >= 0.0))
            throw Error(Errc::InvalidArgument, "region size must be non-negative");
        const int x0 = std::max(0, static_cast<int>(std::ceil(center_.x - w / 2.0)));
        const int x1 = std::min(image_width - 1, static_cast<int>(std::floor(center_.x + w / 2.0)));
        const int y0 = std::max(0, static_cast<int>(std::ceil(center_.y - h / 2.0)));
        const int y1 = std::min(image_height - 1, static_cast<int>(std::floor(center_.y + h / 2.0)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                if (x == center_.x && y == center_.y) center_index_ = pixels_.size();
                pixels_.push_back({x, y});
            }
        }
    }

    Pixel center() const noexcept { return center_; }
    double width() const noexcept { return w_; }
    double height() const noexcept { return h_; }
    const std::vector<Pixel>& pixels() const noexcept { return pixels_; }
    std::size_t size() const noexcept { return pixels_.size(); }
    std::size_t center_index() const noexcept { return center_index_; }

    bool contains(Pixel p) const noexcept {
        return p.x >= 0 && p.y >= 0 && p.x < image_width_ && p.y < image_height_ &&
               std::abs(p.x - center_.x) <= w_ / 2.0 && std::abs(p.y - center_.y) <= h_ / 2.0;
    }

private:
    Pixel center_;
    double w_;
    double h_;
    int image_width_;
    int image_height_;
    std::vector<Pixel> pixels_;
    std::size_t center_index_{0};
};

inline Region build_region(double u, double v, double w, double h, int image_width,
                           int image_height) {
    return Region(u, v, w, h, image_width, image_height);
}

struct Detection {
    double u{0.0};
    double v{0.0};
    double w{0.0};
    double h{0.0};
    ObjectClass cls{ObjectClass::Car};
    float score{1.0f};

    Region region(int image_width, int image_height) const {
        return build_region(u, v, w, h, image_width, image_height);
    }
};

/// Maps a decoded peak to image space with the given size and class.
inline Detection detection_from_peak(const Peak& p, const Heatmap& hm, double w, double h,
                                     ObjectClass cls) {
    return {hm.image_u(p.cell.x), hm.image_v(p.cell.y), w, h, cls, p.score};
}

}  // namespace centerdepth
