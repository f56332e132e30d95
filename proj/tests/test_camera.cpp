#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "centerdepth/camera.hpp"
#include "oracles.hpp"

using namespace centerdepth;

namespace {

CameraIntrinsics kitti() { return CameraIntrinsics::kitti_like(); }

RigidTransform random_transform(std::mt19937_64& g) {
    std::normal_distribution<double> n(0.0, 1.0);
    RigidTransform x;
    x.rotation = Eigen::Quaterniond(n(g), n(g), n(g), n(g)).normalized().toRotationMatrix();
    x.translation = Eigen::Vector3d(n(g), n(g), n(g)) * 5.0;
    return x;
}

}  // namespace

TEST(WorldToCamera, IdentityLeavesPointUnchanged) {
    const auto p = world_to_camera({Eigen::Vector3d(1, 2, 3)}, RigidTransform::identity());
    EXPECT_EQ(p.p, Eigen::Vector3d(1, 2, 3));
}

TEST(WorldToCamera, QuarterTurnAboutZ) {
    RigidTransform x;
    x.rotation = Eigen::AngleAxisd(M_PI / 2, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    const auto p = world_to_camera({Eigen::Vector3d(1, 0, 0)}, x);
    EXPECT_NEAR(p.p.x(), 0.0, 1e-15);
    EXPECT_NEAR(p.p.y(), 1.0, 1e-15);
    EXPECT_NEAR(p.p.z(), 0.0, 1e-15);
}

TEST(WorldToCamera, MatchesHomogeneousMatrix) {
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int i = 0; i < 1000; ++i) {
        const auto x = random_transform(g);
        const Eigen::Vector3d pw(u(g), u(g), u(g));
        Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
        m.topLeftCorner<3, 3>() = x.rotation;
        m.topRightCorner<3, 1>() = x.translation;
        const Eigen::Vector4d h = m * pw.homogeneous();
        const auto p = world_to_camera({pw}, x);
        EXPECT_LT((p.p - h.head<3>()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(RigidTransform, CompositionStaysOrthonormal) {
    std::mt19937_64 g(2);
    RigidTransform acc;
    for (int i = 0; i < 200; ++i) {
        acc = random_transform(g).compose(acc);
        ASSERT_TRUE(acc.is_valid());
    }
    const auto round = acc.compose(acc.inverse());
    EXPECT_LT((round.rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Project, OpticalAxisHitsPrincipalPoint) {
    const auto k = kitti();
    for (double z : {0.5, 10.0, 150.0}) {
        const auto ip = project_to_image({Eigen::Vector3d(0, 0, z)}, k);
        EXPECT_EQ(ip.u, k.cx);
        EXPECT_EQ(ip.v, k.cy);
        EXPECT_EQ(ip.depth, z);
    }
}

TEST(Project, KnownPoint) {
    const auto ip = project_to_image({Eigen::Vector3d(2, 1, 10)}, kitti());
    const auto h = oracle::project_homogeneous({700, 0, 621, 0, 700, 187.5, 0, 0, 1},
                                               {1, 0, 0, 0, 1, 0, 0, 0, 1}, {0, 0, 0}, {2, 1, 10});
    EXPECT_DOUBLE_EQ(ip.u, h.u);
    EXPECT_DOUBLE_EQ(ip.v, h.v);
    EXPECT_DOUBLE_EQ(ip.u, 761.0);
    EXPECT_DOUBLE_EQ(ip.v, 257.5);
}

TEST(Project, BehindCameraThrows) {
    try {
        project_to_image({Eigen::Vector3d(1, 1, -5)}, kitti());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::BehindCamera);
    }
    EXPECT_THROW(project_to_image({Eigen::Vector3d(1, 1, 0)}, kitti()), Error);
}

TEST(BackProject, PrincipalPointInverse) {
    const auto k = kitti();
    const auto p = back_project({k.cx, k.cy, 10.0}, k);
    EXPECT_EQ(p.p, Eigen::Vector3d(0, 0, 10));
}

TEST(BackProject, ZeroDepthRejected) {
    try {
        back_project({100, 100, 0.0}, kitti());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NonPositiveDepth);
    }
}

TEST(BackProject, RoundTrip) {
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> xy(-40, 40), z(0.1, 250);
    const auto k = kitti();
    for (int i = 0; i < 1000; ++i) {
        const Eigen::Vector3d p(xy(g), xy(g), z(g));
        const auto back = back_project(project_to_image({p}, k), k);
        EXPECT_LT((back.p - p).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(Box3D, VerticesFormValidCuboid) {
    const auto b = Box3D::from_pose(ObjectClass::Car, Eigen::Vector3d(1, 2, 30), 0.7, 4.2, 1.8, 1.5);
    EXPECT_TRUE(b.is_valid());
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& v : b.vertices) mean += v;
    EXPECT_LT((mean / 8.0 - b.center).norm(), 1e-12);
}

TEST(ProjectBox, CenteredCubeIsSymmetric) {
    const auto k = kitti();
    const auto b = Box3D::from_pose(ObjectClass::Car, Eigen::Vector3d(0, 0, 10), 0.0, 1, 1, 1);
    const auto a = project_box(b, RigidTransform::identity(), k);

    double umin = 1e9, umax = -1e9, vmin = 1e9, vmax = -1e9;
    for (const auto& v : b.vertices) {
        const auto h = oracle::project_homogeneous({k.fx, 0, k.cx, 0, k.fy, k.cy, 0, 0, 1},
                                                   {1, 0, 0, 0, 1, 0, 0, 0, 1}, {0, 0, 0},
                                                   {v.x(), v.y(), v.z()});
        umin = std::min(umin, h.u);
        umax = std::max(umax, h.u);
        vmin = std::min(vmin, h.v);
        vmax = std::max(vmax, h.v);
    }
    EXPECT_NEAR(a.x_min, umin, 1e-9);
    EXPECT_NEAR(a.x_max, umax, 1e-9);
    EXPECT_NEAR(a.y_min, vmin, 1e-9);
    EXPECT_NEAR(a.y_max, vmax, 1e-9);
    EXPECT_NEAR(a.x_min + a.x_max, 2 * k.cx, 1e-9);
    EXPECT_NEAR(a.y_min + a.y_max, 2 * k.cy, 1e-9);
    EXPECT_DOUBLE_EQ(a.depth_m, 10.0);
    EXPECT_DOUBLE_EQ(a.visibility, 1.0);
}

TEST(ProjectBox, FullyBehindCamera) {
    const auto b = Box3D::from_pose(ObjectClass::Car, Eigen::Vector3d(0, 0, -10), 0.0, 1, 1, 1);
    try {
        project_box(b, RigidTransform::identity(), kitti());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::FullyBehindCamera);
    }
}

TEST(ProjectBox, LeftEdgeStraddleIsClamped) {
    const auto k = kitti();
    // Center projects to u = 621 - 700 * 9 / 10 = -9.
    const auto b = Box3D::from_pose(ObjectClass::Car, Eigen::Vector3d(-9, 0, 10), 0.0, 1, 2, 1);
    const auto a = project_box(b, RigidTransform::identity(), k);
    EXPECT_EQ(a.x_min, 0.0);
    // Box spans x in [-10, -8], z in [9.5, 10.5]; the hull runs from the near
    // outer edge to the far inner edge.
    const double umin = k.fx * -10 / 9.5 + k.cx, umax = k.fx * -8 / 10.5 + k.cx;
    EXPECT_NEAR(a.x_max, umax, 1e-9);
    EXPECT_NEAR(a.visibility, (umax - 0.0) / (umax - umin), 1e-9);
    EXPECT_LT(a.visibility, 1.0);
}

TEST(ProjectBox, OpticalAxisConvention) {
    const auto b = Box3D::from_pose(ObjectClass::Van, Eigen::Vector3d(3, 0, 4), 0.0, 1, 1, 1);
    EXPECT_DOUBLE_EQ(project_box(b, RigidTransform::identity(), kitti()).depth_m, 5.0);
    EXPECT_DOUBLE_EQ(
        project_box(b, RigidTransform::identity(), kitti(), DepthConvention::OpticalAxis).depth_m,
        4.0);
}

TEST(FilterTargets, DropsBeyondTwoHundredMeters) {
    std::vector<Annotation2D> anns(3);
    anns[0].depth_m = 50;
    anns[1].depth_m = 199;
    anns[2].depth_m = 201;
    const auto kept = filter_targets(anns, 200.0, 0.0);
    ASSERT_EQ(kept.size(), 2u);
    EXPECT_EQ(kept[0].depth_m, 50);
    EXPECT_EQ(kept[1].depth_m, 199);
}

TEST(FilterTargets, EmptyAndIdentity) {
    EXPECT_TRUE(filter_targets({}, 200.0, 0.25).empty());
    std::vector<Annotation2D> anns(4);
    for (int i = 0; i < 4; ++i) anns[i].depth_m = 10.0 * (i + 1);
    EXPECT_EQ(filter_targets(anns, 200.0, 0.25), anns);
}

TEST(FilterTargets, VisibilityThreshold) {
    std::vector<Annotation2D> anns(3);
    anns[0].visibility = 0.2;
    anns[1].visibility = 0.25;
    anns[2].visibility = 0.9;
    const auto kept = filter_targets(anns, 200.0, 0.25);
    ASSERT_EQ(kept.size(), 2u);
    EXPECT_EQ(kept[0].visibility, 0.25);
}
