#include "quadfg/traj/reference.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace quadfg;
using traj::AttitudeRule;
using traj::CircleSpec;

namespace {
constexpr double kPi = std::numbers::pi;

CircleSpec paper_circle() {
  CircleSpec spec;
  spec.radius = 1.5;
  spec.speed = 5.0;
  spec.center = Eigen::Vector3d::Zero();
  return spec;
}
}  // namespace

TEST(CircleRef, StartPointAndSpeed) {
  const auto ref = traj::circle_ref(paper_circle(), 0.0);
  EXPECT_LT((ref.position - Eigen::Vector3d(1.5, 0.0, 0.0)).norm(), 1e-12);
  EXPECT_NEAR(ref.velocity.norm(), 5.0, 1e-12);
}

TEST(CircleRef, QuarterPeriodGeometry) {
  const CircleSpec spec = paper_circle();
  const double quarter = 2.0 * kPi * spec.radius / spec.speed / 4.0;
  const auto ref = traj::circle_ref(spec, quarter);
  EXPECT_LT((ref.position - Eigen::Vector3d(0.0, 1.5, 0.0)).norm(), 1e-12);
}

TEST(CircleRef, RadiusAndTangencySweep) {
  const CircleSpec spec = paper_circle();
  for (int k = 0; k <= 100; ++k) {
    const double t = 0.037 * k;
    const auto ref = traj::circle_ref(spec, t);
    EXPECT_NEAR((ref.position - spec.center).norm(), spec.radius, 1e-12);
    EXPECT_NEAR(ref.velocity.dot(ref.position - spec.center), 0.0, 1e-11);
    EXPECT_NEAR(ref.velocity.norm(), spec.speed, 1e-12);
  }
}

TEST(CircleRef, PeriodicWithinTolerance) {
  const CircleSpec spec = paper_circle();
  const double period = 2.0 * kPi * spec.radius / spec.speed;
  for (const double t : {0.0, 0.31, 1.7}) {
    const auto a = traj::circle_ref(spec, t);
    const auto b = traj::circle_ref(spec, t + period);
    EXPECT_LT((a.position - b.position).norm(), 1e-9);
    EXPECT_LT((a.velocity - b.velocity).norm(), 1e-9);
  }
}

TEST(CircleRef, FiniteDifferenceVelocity) {
  const CircleSpec spec = paper_circle();
  const double h = 1e-6;
  for (const double t : {0.1, 0.9, 2.3}) {
    const auto plus = traj::circle_ref(spec, t + h);
    const auto minus = traj::circle_ref(spec, t - h);
    const Eigen::Vector3d fd = (plus.position - minus.position) / (2.0 * h);
    EXPECT_LT((fd - traj::circle_ref(spec, t).velocity).norm(), 1e-8);
  }
}

TEST(CircleRef, FlatAttitudeCarriesCentripetalLoad) {
  const CircleSpec spec = paper_circle();
  const double gravity = 10.0;
  const auto ref = traj::circle_ref(spec, 0.4, AttitudeRule::FlatnessConsistent, gravity);
  EXPECT_TRUE(so3::is_rotation(ref.rotation, 1e-12));
  const Eigen::Vector3d accel = -(spec.speed * spec.speed / spec.radius) *
                                (ref.position - spec.center).normalized();
  const Eigen::Vector3d thrust_dir = (accel + gravity * Eigen::Vector3d::UnitZ()).normalized();
  EXPECT_LT((ref.rotation.col(2) - thrust_dir).norm(), 1e-12);
  EXPECT_GT(ref.rotation.col(0).dot(ref.velocity.normalized()), 0.5);
}

TEST(CircleRef, YawOnlyAttitudeStaysLevel) {
  const auto ref = traj::circle_ref(paper_circle(), 0.7, AttitudeRule::YawOnly);
  EXPECT_LT((ref.rotation.col(2) - Eigen::Vector3d::UnitZ()).norm(), 1e-12);
  const double yaw = std::atan2(ref.velocity.y(), ref.velocity.x());
  EXPECT_LT((ref.rotation.col(0) - Eigen::Vector3d(std::cos(yaw), std::sin(yaw), 0.0)).norm(),
            1e-12);
}

TEST(HoverRef, ConstantPointIdentityAttitude) {
  const auto ref = traj::hover_ref({1.0, -2.0, 3.0});
  EXPECT_EQ(ref.position, Eigen::Vector3d(1.0, -2.0, 3.0));
  EXPECT_EQ(ref.velocity, Eigen::Vector3d::Zero());
  EXPECT_EQ(ref.rotation, Eigen::Matrix3d::Identity());
}

TEST(HoverRef, ZeroSpeedCircleDegeneratesToHoverPoint) {
  CircleSpec spec = paper_circle();
  spec.speed = 0.0;
  const auto still = traj::circle_ref(spec, 12.3);
  const auto hover = traj::hover_ref(spec.center + Eigen::Vector3d(spec.radius, 0.0, 0.0));
  EXPECT_LT((still.position - hover.position).norm(), 1e-12);
  EXPECT_LT((still.velocity - hover.velocity).norm(), 1e-12);
}

TEST(CircleState, SteadyTurnBodyRate) {
  const CircleSpec spec = paper_circle();
  const auto x = traj::circle_state(spec, 0.6);
  const double turn_rate = spec.speed / spec.radius;
  const Eigen::Vector3d world_rate = x.rotation * x.body_rate;
  EXPECT_LT((world_rate - turn_rate * Eigen::Vector3d::UnitZ()).norm(), 1e-12);
}

TEST(CircleSpec, RejectsNonPositiveRadius) {
  CircleSpec spec = paper_circle();
  spec.radius = 0.0;
  EXPECT_THROW(spec.validate(), std::invalid_argument);
}
