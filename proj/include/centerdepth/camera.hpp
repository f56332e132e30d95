#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "centerdepth/errors.hpp"
#include "centerdepth/object_class.hpp"

namespace centerdepth {

/// Pinhole intrinsics. Pixel (0,0) is the top-left pixel center.
struct CameraIntrinsics {
    double fx{700.0};
    double fy{700.0};
    double cx{621.0};
    double cy{187.5};
    int width{1242};
    int height{375};

    /// KITTI-shaped 1242x375 camera with the principal point at the image center.
    static CameraIntrinsics kitti_like(double focal = 700.0) {
        return {focal, focal, 1242.0 / 2.0, 375.0 / 2.0, 1242, 375};
    }

    bool is_valid() const noexcept {
        return fx > 0 && fy > 0 && width > 0 && height > 0 && cx >= 0 && cx < width &&
               cy >= 0 && cy < height;
    }

    Eigen::Matrix3d matrix() const {
        Eigen::Matrix3d k;
        k << fx, 0, cx, 0, fy, cy, 0, 0, 1;
        return k;
    }
};

struct WorldPoint {
    Eigen::Vector3d p{Eigen::Vector3d::Zero()};
};

/// Camera frame: X right, Y down, Z along the optical axis.
struct CameraPoint {
    Eigen::Vector3d p{Eigen::Vector3d::Zero()};
};

struct ImagePoint {
    double u{0.0};
    double v{0.0};
    double depth{0.0};
};

/// World-to-camera rigid transform, x_cam = R * x_world + t.
struct RigidTransform {
    Eigen::Matrix3d rotation{Eigen::Matrix3d::Identity()};
    Eigen::Vector3d translation{Eigen::Vector3d::Zero()};

    static RigidTransform identity() { return {}; }

    bool is_valid(double tol = 1e-9) const {
        const double ortho =
            (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
        return ortho < tol && std::abs(rotation.determinant() - 1.0) < tol &&
               translation.allFinite();
    }

    /// (this ∘ other): apply `other` first.
    RigidTransform compose(const RigidTransform& other) const {
        return {rotation * other.rotation, rotation * other.translation + translation};
    }

    RigidTransform inverse() const {
        const Eigen::Matrix3d rt = rotation.transpose();
        return {rt, -rt * translation};
    }
};

inline CameraPoint world_to_camera(const WorldPoint& p, const RigidTransform& x) {
    return {x.rotation * p.p + x.translation};
}

inline ImagePoint project_to_image(const CameraPoint& p, const CameraIntrinsics& k) {
    const double z = p.p.z();
    if (!(z > 0.0)) throw Error(Errc::BehindCamera, "camera-space Z = " + std::to_string(z));
    return {k.fx * p.p.x() / z + k.cx, k.fy * p.p.y() / z + k.cy, z};
}

inline CameraPoint back_project(const ImagePoint& ip, const CameraIntrinsics& k) {
    const double d = ip.depth;
    if (!(d > 0.0)) throw Error(Errc::NonPositiveDepth, "depth = " + std::to_string(d));
    return {Eigen::Vector3d((ip.u - k.cx) * d / k.fx, (ip.v - k.cy) * d / k.fy, d)};
}

/// Oriented cuboid in world coordinates.
struct Box3D {
    ObjectClass cls{ObjectClass::Car};
    std::array<Eigen::Vector3d, 8> vertices{};
    Eigen::Vector3d center{Eigen::Vector3d::Zero()};

    /// Cuboid with heading `yaw` about the vertical (Y) axis; yaw 0 faces +Z.
    /// Vertex i has sign bits (length, width, height) = (i&1, i&2, i&4).
    static Box3D from_pose(ObjectClass cls, const Eigen::Vector3d& center, double yaw,
                           double length, double width, double height) {
        const Eigen::Vector3d heading(std::sin(yaw), 0.0, std::cos(yaw));
        const Eigen::Vector3d lateral(std::cos(yaw), 0.0, -std::sin(yaw));
        const Eigen::Vector3d up(0.0, 1.0, 0.0);
        Box3D b;
        b.cls = cls;
        b.center = center;
        for (int i = 0; i < 8; ++i) {
            const double sl = (i & 1) ? 0.5 : -0.5;
            const double sw = (i & 2) ? 0.5 : -0.5;
            const double sh = (i & 4) ? 0.5 : -0.5;
            b.vertices[i] = center + sl * length * heading + sw * width * lateral + sh * height * up;
        }
        return b;
    }

    /// Opposite-face centroids must be equidistant from the center.
    bool is_valid(double tol = 1e-6) const {
        for (int bit : {1, 2, 4}) {
            Eigen::Vector3d lo = Eigen::Vector3d::Zero(), hi = Eigen::Vector3d::Zero();
            for (int i = 0; i < 8; ++i) ((i & bit) ? hi : lo) += vertices[i] / 4.0;
            if (std::abs((lo - center).norm() - (hi - center).norm()) > tol) return false;
            if (((lo + hi) / 2.0 - center).norm() > tol) return false;
        }
        return true;
    }
};

enum class DepthConvention { Euclidean, OpticalAxis };

struct Annotation2D {
    ObjectClass cls{ObjectClass::Car};
    double x_min{0}, y_min{0}, x_max{0}, y_max{0};
    double u{0}, v{0};
    double depth_m{0};
    double visibility{1.0};

    double box_width() const noexcept { return x_max - x_min; }
    double box_height() const noexcept { return y_max - y_min; }
    double area() const noexcept { return box_width() * box_height(); }

    bool contains(double px, double py) const noexcept {
        return px >= x_min && px <= x_max && py >= y_min && py <= y_max;
    }

    friend bool operator==(const Annotation2D&, const Annotation2D&) = default;
};

inline double iou(const Annotation2D& a, const Annotation2D& b) {
    const double ix = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
    const double iy = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
    const double inter = ix * iy;
    const double uni = a.area() + b.area() - inter;
    return uni > 0 ? inter / uni : 0.0;
}

/// Annotates a 3D box: 2D box is the axis-aligned hull of the projected vertices,
/// clamped to the image. Edges crossing the near plane are clipped so partially
/// visible boxes still get a hull. Visibility is the clamped/unclamped hull area ratio.
inline Annotation2D project_box(const Box3D& b, const RigidTransform& x,
                                const CameraIntrinsics& k,
                                DepthConvention convention = DepthConvention::Euclidean) {
    constexpr double kNear = 1e-3;
    std::array<Eigen::Vector3d, 8> cam;
    int in_front = 0;
    for (int i = 0; i < 8; ++i) {
        cam[i] = world_to_camera({b.vertices[i]}, x).p;
        if (cam[i].z() > 0.0) ++in_front;
    }
    if (in_front == 0) throw Error(Errc::FullyBehindCamera, "all 8 vertices have Z <= 0");
    const Eigen::Vector3d center = world_to_camera({b.center}, x).p;
    if (!(center.z() > 0.0)) throw Error(Errc::BehindCamera, "box center has Z <= 0");

    std::vector<Eigen::Vector3d> hull_pts;
    for (const auto& p : cam)
        if (p.z() > kNear) hull_pts.push_back(p);
    for (int i = 0; i < 8; ++i) {
        for (int bit : {1, 2, 4}) {
            const int j = i | bit;
            if (j == i) continue;
            const auto& a = cam[i];
            const auto& c = cam[j];
            if ((a.z() > kNear) != (c.z() > kNear)) {
                const double s = (kNear - a.z()) / (c.z() - a.z());
                hull_pts.push_back(a + s * (c - a));
            }
        }
    }

    double umin = std::numeric_limits<double>::infinity(), vmin = umin;
    double umax = -umin, vmax = -umin;
    for (const auto& p : hull_pts) {
        const ImagePoint ip = project_to_image({p}, k);
        umin = std::min(umin, ip.u);
        umax = std::max(umax, ip.u);
        vmin = std::min(vmin, ip.v);
        vmax = std::max(vmax, ip.v);
    }
    const double full_area = (umax - umin) * (vmax - vmin);
    if (!(full_area > 0.0) || !std::isfinite(full_area))
        throw Error(Errc::DegenerateProjection, "projected hull has no area");

    Annotation2D ann;
    ann.cls = b.cls;
    ann.x_min = std::clamp(umin, 0.0, k.width - 1.0);
    ann.x_max = std::clamp(umax, 0.0, k.width - 1.0);
    ann.y_min = std::clamp(vmin, 0.0, k.height - 1.0);
    ann.y_max = std::clamp(vmax, 0.0, k.height - 1.0);
    if (!(ann.x_max > ann.x_min) || !(ann.y_max > ann.y_min))
        throw Error(Errc::DegenerateProjection, "box lies outside the image");

    const ImagePoint c = project_to_image({center}, k);
    ann.u = c.u;
    ann.v = c.v;
    ann.depth_m = convention == DepthConvention::Euclidean ? center.norm() : center.z();
    ann.visibility = std::clamp(ann.area() / full_area, 0.0, 1.0);
    return ann;
}

/// Keeps targets within `max_range` whose visibility is at least `min_visibility`.
inline std::vector<Annotation2D> filter_targets(std::span<const Annotation2D> anns,
                                                double max_range, double min_visibility) {
    std::vector<Annotation2D> out;
    for (const auto& a : anns)
        if (a.depth_m <= max_range && a.visibility >= min_visibility) out.push_back(a);
    return out;
}

}  // namespace centerdepth
