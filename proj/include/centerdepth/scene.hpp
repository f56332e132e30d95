#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "centerdepth/camera.hpp"
#include "centerdepth/errors.hpp"
#include "centerdepth/heatmap.hpp"
#include "centerdepth/raster.hpp"
#include "centerdepth/rng.hpp"

namespace centerdepth::scene {

struct SizeRange {
    double length_lo, length_hi;
    double width_lo, width_hi;
    double height_lo, height_hi;
};

/// Physical dimension ranges (meters) sampled for each class.
constexpr SizeRange size_range(ObjectClass c) {
    switch (c) {
        case ObjectClass::Car: return {3.5, 5.5, 1.6, 2.0, 1.4, 1.7};
        case ObjectClass::Van: return {4.5, 6.0, 1.8, 2.1, 1.9, 2.6};
        case ObjectClass::Truck: return {6.0, 12.0, 2.3, 2.6, 2.8, 4.0};
        case ObjectClass::Bicycle: return {1.5, 1.9, 0.5, 0.8, 1.5, 1.9};
        case ObjectClass::Pedestrian: return {0.4, 0.8, 0.4, 0.8, 1.5, 2.0};
    }
    return {3.5, 5.5, 1.6, 2.0, 1.4, 1.7};
}

/// Depth-correlated feature signal on channel 0.
inline double depth_signal(double depth) { return std::min(depth / 200.0, 1.0); }

struct SceneConfig {
    std::uint64_t seed{7};
    CameraIntrinsics camera{CameraIntrinsics::kitti_like()};
    double camera_height{1.65};  ///< meters above the ground plane
    int feature_size{128};       ///< N: feature map and heatmap are N x N
    int channels{4};             ///< C
    int targets_per_bin{3};
    std::vector<std::pair<double, double>> bins{{0, 50}, {50, 100}, {100, 150}, {150, 200}};
    /// car, van, truck, bicycle, pedestrian
    std::array<double, 5> class_weights{0.45, 0.15, 0.1, 0.1, 0.2};
    double noise_sigma{0.01};
    double background_depth{300.0};
    double min_range{3.0};       ///< no target is placed closer than this
    double min_visibility{0.25};
    double max_iou{0.7};
    int max_retries{1000};
    DepthConvention convention{DepthConvention::Euclidean};

    void validate() const {
        auto fail = [](const std::string& what) { throw Error(Errc::ValidationFailure, what); };
        if (!camera.is_valid()) fail("camera: fx > 0, fy > 0, 0 <= cx < width, 0 <= cy < height");
        if (camera.width > 65535 || camera.height > 65535) fail("image dimensions <= 65535");
        if (feature_size < 16) fail("feature_size >= 16");
        if (channels < 2) fail("channels >= 2");
        if (targets_per_bin < 0) fail("targets_per_bin >= 0");
        if (!(noise_sigma >= 0)) fail("noise_sigma >= 0");
        if (!(background_depth > 0)) fail("background_depth > 0");
        if (!(camera_height > 0)) fail("camera_height > 0");
        if (!(min_range > 0)) fail("min_range > 0");
        if (!(min_visibility >= 0 && min_visibility <= 1)) fail("0 <= min_visibility <= 1");
        if (max_retries < 1) fail("max_retries >= 1");
        double wsum = 0;
        for (double w : class_weights) {
            if (!(w >= 0)) fail("class weights >= 0");
            wsum += w;
        }
        if (!(wsum > 0)) fail("class weights sum > 0");
        for (std::size_t i = 0; i < bins.size(); ++i) {
            const auto [lo, hi] = bins[i];
            if (!(lo >= 0 && hi > lo && hi <= 200)) fail("bins ordered within (0, 200]");
            if (i > 0 && lo < bins[i - 1].second) fail("bins non-overlapping and ordered");
        }
    }

    /// World frame: axes parallel to the camera, origin on the ground below it.
    RigidTransform world_to_camera() const {
        RigidTransform x;
        x.translation = Eigen::Vector3d(0.0, camera_height, 0.0);
        return x;
    }

    double stride_x() const { return static_cast<double>(camera.width) / feature_size; }
    double stride_y() const { return static_cast<double>(camera.height) / feature_size; }
};

struct TargetInstance {
    ObjectClass cls{ObjectClass::Car};
    Eigen::Vector3d position{Eigen::Vector3d::Zero()};  ///< world-space box center
    double yaw{0.0};
    double length{0.0}, width{0.0}, height{0.0};
    std::size_t bin{0};
    Annotation2D annotation;

    Box3D box() const { return Box3D::from_pose(cls, position, yaw, length, width, height); }

    friend bool operator==(const TargetInstance& a, const TargetInstance& b) {
        return a.cls == b.cls && a.position == b.position && a.yaw == b.yaw &&
               a.length == b.length && a.width == b.width && a.height == b.height &&
               a.bin == b.bin && a.annotation == b.annotation;
    }
};

namespace detail {
inline ObjectClass sample_class(rng::Generator& g, const std::array<double, 5>& weights) {
    double total = 0;
    for (double w : weights) total += w;
    double x = g.uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (x < weights[i]) return kAllClasses[i];
        x -= weights[i];
    }
    for (std::size_t i = weights.size(); i-- > 0;)
        if (weights[i] > 0) return kAllClasses[i];
    return ObjectClass::Car;
}
}  // namespace detail

/// Places `targets_per_bin` targets in every depth bin of frame `frame_index`.
/// A candidate is re-drawn when its projection is degenerate, its center leaves
/// the image, its visibility is below `min_visibility`, or its box overlaps an
/// already placed box with IoU above `max_iou`.
inline std::vector<TargetInstance> generate_scene(const SceneConfig& cfg,
                                                  std::uint64_t frame_index = 0) {
    cfg.validate();
    rng::Generator g(cfg.seed, rng::Stream::Scene, frame_index);
    const auto& k = cfg.camera;
    const RigidTransform w2c = cfg.world_to_camera();
    std::vector<TargetInstance> out;
    for (std::size_t b = 0; b < cfg.bins.size(); ++b) {
        const double lo = std::max(cfg.bins[b].first, cfg.min_range);
        const double hi = cfg.bins[b].second;
        for (int t = 0; t < cfg.targets_per_bin; ++t) {
            bool placed = false;
            for (int attempt = 0; attempt < cfg.max_retries && !placed; ++attempt) {
                TargetInstance ti;
                ti.cls = detail::sample_class(g, cfg.class_weights);
                const SizeRange sr = size_range(ti.cls);
                ti.length = g.uniform(sr.length_lo, sr.length_hi);
                ti.width = g.uniform(sr.width_lo, sr.width_hi);
                ti.height = g.uniform(sr.height_lo, sr.height_hi);
                ti.yaw = g.uniform(-std::numbers::pi, std::numbers::pi);
                ti.bin = b;
                const double range = g.uniform(lo, hi);
                const double u = g.uniform(0.0, k.width - 1.0);
                if (!(hi > lo)) continue;

                const double y_cam = cfg.camera_height - ti.height / 2.0;
                const double a = (u - k.cx) / k.fx;
                double z;
                if (cfg.convention == DepthConvention::Euclidean) {
                    if (range <= std::abs(y_cam)) continue;
                    z = std::sqrt((range * range - y_cam * y_cam) / (1.0 + a * a));
                } else {
                    z = range;
                }
                const Eigen::Vector3d cam(a * z, y_cam, z);
                ti.position = cam - w2c.translation;
                try {
                    ti.annotation = project_box(ti.box(), w2c, k, cfg.convention);
                } catch (const Error&) {
                    continue;
                }
                const auto& ann = ti.annotation;
                if (ann.u < 0 || ann.u > k.width - 1 || ann.v < 0 || ann.v > k.height - 1) continue;
                if (ann.depth_m < lo || ann.depth_m >= hi) continue;
                if (ann.visibility < cfg.min_visibility) continue;
                bool collides = false;
                for (const auto& other : out)
                    if (iou(ann, other.annotation) > cfg.max_iou) collides = true;
                if (collides) continue;
                out.push_back(std::move(ti));
                placed = true;
            }
            if (!placed)
                throw Error(Errc::PlacementExhausted,
                            "bin " + std::to_string(b) + " target " + std::to_string(t) +
                                " after " + std::to_string(cfg.max_retries) + " retries");
        }
    }
    return out;
}

struct SyntheticFrame {
    std::string id;
    DepthRaster depth;      ///< width x height, meters
    FeatureMap features;    ///< N x N x C
    Heatmap heatmap;        ///< N x N
    Raster<float> sizes;    ///< N x N x 2, box (w, h) in pixels at each center cell
    std::vector<Annotation2D> annotations;

    friend bool operator==(const SyntheticFrame&, const SyntheticFrame&) = default;
};

inline std::string frame_id(std::uint64_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06llu", static_cast<unsigned long long>(index));
    return buf;
}

/// Integer pixel span covered by an annotation box.
struct PixelBox {
    int x0, y0, x1, y1;
};

inline PixelBox pixel_box(const Annotation2D& a) {
    return {static_cast<int>(std::ceil(a.x_min)), static_cast<int>(std::ceil(a.y_min)),
            static_cast<int>(std::floor(a.x_max)), static_cast<int>(std::floor(a.y_max))};
}

/// Rasterizes targets into depth, feature and heatmap layers.
///
/// Depth: each box is filled with its target's center depth, nearest target wins,
/// background elsewhere. Per-pixel features are channel 0 = depth_signal(depth),
/// channel 1 = objectness, channel 2 = class code (class + 1) / 5, channels 3.. =
/// per-target texture values; each feature cell is the mean over its pixels plus
/// N(0, noise_sigma) noise per channel. Returned annotations carry visibility
/// reduced by occlusion.
inline SyntheticFrame render_frame(const std::vector<TargetInstance>& targets,
                                   const SceneConfig& cfg, std::uint64_t frame_index = 0) {
    cfg.validate();
    const auto& k = cfg.camera;
    const int n = cfg.feature_size;
    const int nc = cfg.channels;
    rng::Generator g(cfg.seed, rng::Stream::Render, frame_index);

    SyntheticFrame f;
    f.id = frame_id(frame_index);
    f.depth = DepthRaster(k.width, k.height, 1, static_cast<float>(cfg.background_depth));
    Raster<int> owner(k.width, k.height, 1, -1);
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const auto& a = targets[t].annotation;
        if (!(a.u >= 0 && a.u <= k.width - 1 && a.v >= 0 && a.v <= k.height - 1))
            throw Error(Errc::CenterOutOfBounds, "target " + std::to_string(t) + " center off-image");
        const PixelBox pb = pixel_box(a);
        const auto d = static_cast<float>(a.depth_m);
        for (int y = std::max(0, pb.y0); y <= std::min(k.height - 1, pb.y1); ++y) {
            for (int x = std::max(0, pb.x0); x <= std::min(k.width - 1, pb.x1); ++x) {
                if (d < f.depth.at(x, y)) {
                    f.depth.at(x, y) = d;
                    owner.at(x, y) = static_cast<int>(t);
                }
            }
        }
    }

    std::vector<std::vector<float>> texture(targets.size());
    for (auto& tex : texture) {
        tex.resize(std::max(0, nc - 3));
        for (auto& v : tex) v = static_cast<float>(g.uniform());
    }

    const double sx = cfg.stride_x();
    const double sy = cfg.stride_y();
    // Area pooling: cell (c, r) averages the pixels with floor(x / sx) == c and
    // floor(y / sy) == r.
    std::vector<double> acc(static_cast<std::size_t>(n) * n * nc, 0.0);
    std::vector<int> hits(static_cast<std::size_t>(n) * n, 0);
    std::vector<int> col_cell(k.width);
    for (int x = 0; x < k.width; ++x)
        col_cell[x] = std::min(n - 1, static_cast<int>(std::floor(x / sx)));
    for (int y = 0; y < k.height; ++y) {
        const int r = std::min(n - 1, static_cast<int>(std::floor(y / sy)));
        for (int x = 0; x < k.width; ++x) {
            const int c = col_cell[x];
            const std::size_t cell = static_cast<std::size_t>(r) * n + c;
            double* a = &acc[cell * nc];
            ++hits[cell];
            a[0] += depth_signal(f.depth.at(x, y));
            const int o = owner.at(x, y);
            if (o < 0) continue;
            a[1] += 1.0;
            if (nc > 2) a[2] += (static_cast<int>(targets[o].cls) + 1) / 5.0;
            for (int ch = 3; ch < nc; ++ch) a[ch] += texture[o][ch - 3];
        }
    }
    f.features = FeatureMap(n, n, nc, 0.0f);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const std::size_t cell = static_cast<std::size_t>(r) * n + c;
            const double count = std::max(1, hits[cell]);
            for (int ch = 0; ch < nc; ++ch) {
                double v = acc[cell * nc + ch] / count;
                if (cfg.noise_sigma > 0) v += g.normal(0.0, cfg.noise_sigma);
                f.features.at(c, r, ch) = static_cast<float>(v);
            }
        }
    }

    // Visibility also accounts for occlusion: the in-image fraction is scaled
    // by the share of the target's box pixels it owns in the depth raster.
    std::vector<std::size_t> owned(targets.size(), 0), covered(targets.size(), 0);
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const PixelBox pb = pixel_box(targets[t].annotation);
        for (int y = std::max(0, pb.y0); y <= std::min(k.height - 1, pb.y1); ++y)
            for (int x = std::max(0, pb.x0); x <= std::min(k.width - 1, pb.x1); ++x) {
                ++covered[t];
                if (owner.at(x, y) == static_cast<int>(t)) ++owned[t];
            }
    }

    f.heatmap = Heatmap(n, n, sx, sy);
    f.sizes = Raster<float>(n, n, 2, 0.0f);
    for (std::size_t t = 0; t < targets.size(); ++t) {
        Annotation2D a = targets[t].annotation;
        if (covered[t] > 0)
            a.visibility *= static_cast<double>(owned[t]) / static_cast<double>(covered[t]);
        const Pixel cell = f.heatmap.cell_of(a.u, a.v);
        render_gaussian_peak(f.heatmap, cell, a.box_width() / sx, a.box_height() / sy);
        f.sizes.at(cell.x, cell.y, 0) = static_cast<float>(a.box_width());
        f.sizes.at(cell.x, cell.y, 1) = static_cast<float>(a.box_height());
        f.annotations.push_back(a);
    }
    return f;
}

inline SyntheticFrame generate_frame(const SceneConfig& cfg, std::uint64_t frame_index) {
    return render_frame(generate_scene(cfg, frame_index), cfg, frame_index);
}

/// Simulated unary prediction: pixel (x, y) becomes
/// max(0.1, d + rel_sigma * d * z) with z = hashed_normal(key, y * width + x)
/// and key = stream_key(seed, UnaryNoise, frame_index).
inline float corrupted_value(float d, double rel_sigma, std::uint64_t key, std::uint64_t counter) {
    const double dd = d;
    return static_cast<float>(std::max(0.1, dd + rel_sigma * dd * rng::hashed_normal(key, counter)));
}

inline DepthRaster corrupt_depth(const DepthRaster& depth, double rel_sigma, std::uint64_t seed,
                                 std::uint64_t frame_index) {
    const std::uint64_t key = rng::stream_key(seed, rng::Stream::UnaryNoise, frame_index);
    DepthRaster out = depth;
    auto data = out.data();
    for (std::size_t i = 0; i < data.size(); ++i)
        data[i] = corrupted_value(data[i], rel_sigma, key, i);
    return out;
}

/// Same values as corrupt_depth, evaluated only inside `boxes`; other pixels keep
/// their clean value.
inline DepthRaster corrupt_depth_in(const DepthRaster& depth, std::span<const PixelBox> boxes,
                                    double rel_sigma, std::uint64_t seed,
                                    std::uint64_t frame_index) {
    const std::uint64_t key = rng::stream_key(seed, rng::Stream::UnaryNoise, frame_index);
    DepthRaster out = depth;
    Raster<std::uint8_t> done(depth.width(), depth.height(), 1, 0);
    for (const auto& b : boxes) {
        for (int y = std::max(0, b.y0); y <= std::min(depth.height() - 1, b.y1); ++y) {
            for (int x = std::max(0, b.x0); x <= std::min(depth.width() - 1, b.x1); ++x) {
                if (done.at(x, y)) continue;
                done.at(x, y) = 1;
                const auto idx = static_cast<std::uint64_t>(y) * depth.width() + x;
                out.at(x, y) = corrupted_value(depth.at(x, y), rel_sigma, key, idx);
            }
        }
    }
    return out;
}

}  // namespace centerdepth::scene
