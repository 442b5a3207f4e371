#include "quadfg/factors/control.hpp"
#include "quadfg/factors/measurement.hpp"

#include <gtest/gtest.h>

#include <random>

#include "quadfg/quad/dynamics.hpp"
#include "support/test_helpers.hpp"

using namespace quadfg;
using quad::QuadParams;
using quad::QuadState;
using quad::RotorSpeeds;
using quad::Wrench;

namespace {

QuadParams params;
constexpr double kFdTol = 1e-5;
constexpr double kDt = 0.01;

fgo::NoiseModel unit_noise(int dim) { return fgo::NoiseModel::isotropic(dim, 1.0); }

factors::RelPoseMeas relative_between(const QuadState& xi, const QuadState& xj,
                                      const Eigen::Matrix3d& ext_rot = Eigen::Matrix3d::Identity(),
                                      const Eigen::Vector3d& ext_trans = Eigen::Vector3d::Zero()) {
  factors::RelPoseMeas m;
  m.extrinsic_rotation = ext_rot;
  m.extrinsic_translation = ext_trans;
  const Eigen::Matrix3d R_li = xi.rotation * ext_rot;
  const Eigen::Vector3d t_li = xi.rotation * ext_trans + xi.position;
  const Eigen::Matrix3d R_lj = xj.rotation * ext_rot;
  const Eigen::Vector3d t_lj = xj.rotation * ext_trans + xj.position;
  m.rotation = R_li.transpose() * R_lj;
  m.translation = R_li.transpose() * (t_lj - t_li);
  m.from_index = 0;
  m.to_index = 1;
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Positioning factor

TEST(PositioningFactor, ZeroAtMeasurement) {
  std::mt19937 rng(31);
  const QuadState x = test::random_state(rng);
  factors::PositioningFactor f(fgo::state_key(0), x, unit_noise(12));
  fgo::Values values;
  values.insert(fgo::state_key(0), x);
  EXPECT_LT(f.residual(values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PositioningFactor, PositionOffsetOnly) {
  QuadState meas;
  QuadState x = meas;
  x.position += Eigen::Vector3d(0.1, 0.0, 0.0);
  factors::PositioningFactor f(fgo::state_key(0), meas, unit_noise(12));
  fgo::Values values;
  values.insert(fgo::state_key(0), x);
  const Eigen::VectorXd r = f.residual(values);
  EXPECT_NEAR(r(0), 0.1, 1e-15);
  EXPECT_LT(r.tail(11).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PositioningFactor, JacobianMatchesFiniteDifferences) {
  std::mt19937 rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    factors::PositioningFactor f(fgo::state_key(0), test::random_state(rng), unit_noise(12));
    fgo::Values values;
    values.insert(fgo::state_key(0), test::random_state(rng));
    EXPECT_LT(test::jacobian_mismatch(f, values), kFdTol);
  }
}

TEST(PositioningFactor, VanishesOnlyAtMeasurement) {
  std::mt19937 rng(33);
  const QuadState meas = test::random_state(rng);
  factors::PositioningFactor f(fgo::state_key(0), meas, unit_noise(12));
  fgo::Values values;
  values.insert(fgo::state_key(0), meas);
  EXPECT_LT(f.residual(values).norm(), 1e-12);
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(12);
  delta(4) = 1e-3;
  values.at(fgo::state_key(0)) = fgo::retract(values.at(fgo::state_key(0)), delta);
  EXPECT_GT(f.residual(values).norm(), 1e-4);
}

// ---------------------------------------------------------------------------
// Relative pose factor

TEST(RelativePoseFactor, ConsistentMeasurementGivesZero) {
  std::mt19937 rng(34);
  const QuadState xi = test::random_state(rng);
  const QuadState xj = test::random_state(rng);
  factors::RelativePoseFactor f(fgo::state_key(0), fgo::state_key(1),
                                relative_between(xi, xj));
  fgo::Values values;
  values.insert(fgo::state_key(0), xi);
  values.insert(fgo::state_key(1), xj);
  EXPECT_LT(f.residual(values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(RelativePoseFactor, IdentityMeasurementIdenticalPoses) {
  std::mt19937 rng(35);
  const QuadState x = test::random_state(rng);
  factors::RelPoseMeas m;  // identity transform
  factors::RelativePoseFactor f(fgo::state_key(0), fgo::state_key(1), m);
  fgo::Values values;
  values.insert(fgo::state_key(0), x);
  values.insert(fgo::state_key(1), x);
  EXPECT_LT(f.residual(values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(RelativePoseFactor, JacobianMatchesFiniteDifferences) {
  std::mt19937 rng(36);
  for (int trial = 0; trial < 50; ++trial) {
    factors::RelPoseMeas m = relative_between(test::random_state(rng), test::random_state(rng));
    factors::RelativePoseFactor f(fgo::state_key(0), fgo::state_key(1), m);
    fgo::Values values;
    values.insert(fgo::state_key(0), test::random_state(rng));
    values.insert(fgo::state_key(1), test::random_state(rng));
    EXPECT_LT(test::jacobian_mismatch(f, values), kFdTol);
  }
}

TEST(RelativePoseFactor, JacobianWithExtrinsicMatchesFiniteDifferences) {
  std::mt19937 rng(37);
  const Eigen::Matrix3d ext_rot = so3::exp({0.2, -0.1, 0.4});
  const Eigen::Vector3d ext_trans(0.1, 0.05, -0.02);
  for (int trial = 0; trial < 25; ++trial) {
    factors::RelPoseMeas m = relative_between(test::random_state(rng), test::random_state(rng),
                                              ext_rot, ext_trans);
    factors::RelativePoseFactor f(fgo::state_key(0), fgo::state_key(1), m);
    fgo::Values values;
    values.insert(fgo::state_key(0), test::random_state(rng));
    values.insert(fgo::state_key(1), test::random_state(rng));
    EXPECT_LT(test::jacobian_mismatch(f, values), kFdTol);
  }
}

// ---------------------------------------------------------------------------
// Dynamics factor

TEST(DynamicsFactor, ZeroOnEulerGeneratedPairs) {
  std::mt19937 rng(38);
  for (int trial = 0; trial < 100; ++trial) {
    const QuadState x0 = test::random_state(rng);
    const Wrench w = test::random_wrench(rng);
    const QuadState x1 = quad::integrate_euler(x0, w, kDt, params);
    factors::DynamicsFactor f(fgo::state_key(0), fgo::wrench_key(0), fgo::state_key(1), kDt,
                              params, unit_noise(12));
    fgo::Values values;
    values.insert(fgo::state_key(0), x0);
    values.insert(fgo::wrench_key(0), w);
    values.insert(fgo::state_key(1), x1);
    EXPECT_LT(f.residual(values).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(DynamicsFactor, HoverPairIsZero) {
  factors::DynamicsFactor f(fgo::state_key(0), fgo::wrench_key(0), fgo::state_key(1), kDt,
                            params, unit_noise(12));
  fgo::Values values;
  values.insert(fgo::state_key(0), QuadState{});
  values.insert(fgo::wrench_key(0), params.hover_wrench());
  values.insert(fgo::state_key(1), QuadState{});
  EXPECT_LT(f.residual(values).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(DynamicsFactor, JacobianMatchesFiniteDifferences) {
  std::mt19937 rng(39);
  for (int trial = 0; trial < 50; ++trial) {
    factors::DynamicsFactor f(fgo::state_key(0), fgo::wrench_key(0), fgo::state_key(1), kDt,
                              params, unit_noise(12));
    fgo::Values values;
    values.insert(fgo::state_key(0), test::random_state(rng));
    values.insert(fgo::wrench_key(0), test::random_wrench(rng));
    values.insert(fgo::state_key(1), test::random_state(rng));
    EXPECT_LT(test::jacobian_mismatch(f, values), kFdTol);
  }
}

TEST(DynamicsFactor, RotationRateBlockIsRightJacobianTimesDt) {
  // On a consistent pair the rotation residual vanishes and its derivative
  // with respect to the body rate reduces to dexp(w dt) * dt.
  std::mt19937 rng(40);
  for (int trial = 0; trial < 20; ++trial) {
    const QuadState x0 = test::random_state(rng);
    const Wrench w = test::random_wrench(rng);
    const QuadState x1 = quad::integrate_euler(x0, w, kDt, params);
    factors::DynamicsFactor f(fgo::state_key(0), fgo::wrench_key(0), fgo::state_key(1), kDt,
                              params, unit_noise(12));
    fgo::Values values;
    values.insert(fgo::state_key(0), x0);
    values.insert(fgo::wrench_key(0), w);
    values.insert(fgo::state_key(1), x1);
    std::vector<Eigen::MatrixXd> J;
    f.jacobians(values, J);
    const Eigen::Matrix3d expected = so3::right_jacobian(x0.body_rate * kDt) * kDt;
    EXPECT_LT((J[0].block<3, 3>(3, 9) - expected).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(DynamicsFactor, BodyRateBlockMatchesInertiaCouplingFormula) {
  // d e_w / d w0 = -I + [[0, a w3, a w2], [b w3, 0, b w1], [c w2, c w1, 0]] dt
  // with a = (I3 - I2)/I1, b = (I1 - I3)/I2, c = (I2 - I1)/I3.
  std::mt19937 rng(41);
  const double a = (params.inertia.z() - params.inertia.y()) / params.inertia.x();
  const double b = (params.inertia.x() - params.inertia.z()) / params.inertia.y();
  const double c = (params.inertia.y() - params.inertia.x()) / params.inertia.z();
  for (int trial = 0; trial < 20; ++trial) {
    const QuadState x0 = test::random_state(rng);
    factors::DynamicsFactor f(fgo::state_key(0), fgo::wrench_key(0), fgo::state_key(1), kDt,
                              params, unit_noise(12));
    fgo::Values values;
    values.insert(fgo::state_key(0), x0);
    values.insert(fgo::wrench_key(0), test::random_wrench(rng));
    values.insert(fgo::state_key(1), test::random_state(rng));
    std::vector<Eigen::MatrixXd> J;
    f.jacobians(values, J);

    const double w1 = x0.body_rate.x(), w2 = x0.body_rate.y(), w3 = x0.body_rate.z();
    Eigen::Matrix3d coupling;
    coupling << 0.0, a * w3, a * w2, b * w3, 0.0, b * w1, c * w2, c * w1, 0.0;
    const Eigen::Matrix3d expected = -Eigen::Matrix3d::Identity() + coupling * kDt;
    EXPECT_LT((J[0].block<3, 3>(9, 9) - expected).cwiseAbs().maxCoeff(), 1e-14);
  }
}

// ---------------------------------------------------------------------------
// Reference factor

TEST(ReferenceFactor, ZeroOnReference) {
  std::mt19937 rng(42);
  const QuadState x = test::random_state(rng);
  factors::RefPoint ref{x.position, x.rotation, x.velocity};
  factors::ReferenceFactor f(fgo::state_key(0), ref, unit_noise(9));
  fgo::Values values;
  values.insert(fgo::state_key(0), x);
  EXPECT_LT(f.residual(values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ReferenceFactor, PurePositionOffset) {
  QuadState x;
  factors::RefPoint ref{x.position + Eigen::Vector3d(0.0, -0.2, 0.0), x.rotation, x.velocity};
  factors::ReferenceFactor f(fgo::state_key(0), ref, unit_noise(9));
  fgo::Values values;
  values.insert(fgo::state_key(0), x);
  const Eigen::VectorXd r = f.residual(values);
  EXPECT_NEAR(r(1), 0.2, 1e-15);
  EXPECT_LT(r.segment<6>(3).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(r(0), 0.0, 1e-15);
  EXPECT_NEAR(r(2), 0.0, 1e-15);
}

TEST(ReferenceFactor, JacobianMatchesFiniteDifferences) {
  std::mt19937 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const QuadState target = test::random_state(rng);
    factors::RefPoint ref{target.position, target.rotation, target.velocity};
    factors::ReferenceFactor f(fgo::state_key(0), ref, unit_noise(9));
    fgo::Values values;
    values.insert(fgo::state_key(0), test::random_state(rng));
    EXPECT_LT(test::jacobian_mismatch(f, values), kFdTol);
  }
}

// ---------------------------------------------------------------------------
// Allocation factor

TEST(AllocationFactor, ZeroWhenConsistent) {
  std::mt19937 rng(44);
  const RotorSpeeds u = test::random_rotor_speeds(rng, params);
  factors::AllocationFactor f(fgo::wrench_key(0), fgo::rotor_key(0), params, unit_noise(4));
  fgo::Values values;
  values.insert(fgo::wrench_key(0), quad::allocate(u, params));
  values.insert(fgo::rotor_key(0), u);
  EXPECT_LT(f.residual(values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(AllocationFactor, ZeroSpeedsLeaveWrench) {
  factors::AllocationFactor f(fgo::wrench_key(0), fgo::rotor_key(0), params, unit_noise(4));
  fgo::Values values;
  values.insert(fgo::wrench_key(0), params.hover_wrench());
  values.insert(fgo::rotor_key(0), RotorSpeeds{Eigen::Vector4d::Zero()});
  EXPECT_EQ(f.residual(values), params.hover_wrench().vec());
}

TEST(AllocationFactor, JacobianMatchesFiniteDifferences) {
  std::mt19937 rng(45);
  for (int trial = 0; trial < 50; ++trial) {
    factors::AllocationFactor f(fgo::wrench_key(0), fgo::rotor_key(0), params, unit_noise(4));
    fgo::Values values;
    values.insert(fgo::wrench_key(0), test::random_wrench(rng));
    values.insert(fgo::rotor_key(0), test::random_rotor_speeds(rng, params));
    EXPECT_LT(test::jacobian_mismatch(f, values), kFdTol);
  }
}

// ---------------------------------------------------------------------------
// Rotor limit factor (hinge)

TEST(RotorLimitFactor, ZeroAtMidRange) {
  factors::RotorLimitFactor f(fgo::rotor_key(0), params, unit_noise(4));
  fgo::Values values;
  values.insert(fgo::rotor_key(0),
                RotorSpeeds{Eigen::Vector4d::Constant(
                    0.5 * (params.rotor_min + params.rotor_max))});
  EXPECT_EQ(f.residual(values), Eigen::Vector4d::Zero());
}

TEST(RotorLimitFactor, BoundaryValuesExact) {
  factors::RotorLimitFactor f(fgo::rotor_key(0), params, unit_noise(4));
  fgo::Values values;
  values.insert(fgo::rotor_key(0), RotorSpeeds{Eigen::Vector4d::Constant(params.rotor_min)});
  EXPECT_EQ(f.residual(values), Eigen::Vector4d::Constant(params.rotor_threshold));
  values.at(fgo::rotor_key(0)) = RotorSpeeds{Eigen::Vector4d::Constant(params.rotor_max)};
  EXPECT_EQ(f.residual(values), Eigen::Vector4d::Constant(params.rotor_threshold));
}

TEST(RotorLimitFactor, ContinuousAtBranchBoundaries) {
  factors::RotorLimitFactor f(fgo::rotor_key(0), params, unit_noise(4));
  fgo::Values values;
  const double lo = params.rotor_min + params.rotor_threshold;
  const double hi = params.rotor_max - params.rotor_threshold;
  const double eps = 1e-9;
  for (const double boundary : {lo, hi}) {
    for (const double u : {boundary - eps, boundary, boundary + eps}) {
      values = fgo::Values{};
      values.insert(fgo::rotor_key(0), RotorSpeeds{Eigen::Vector4d::Constant(u)});
      EXPECT_LE(f.residual(values).cwiseAbs().maxCoeff(), eps + 1e-15)
          << "boundary " << boundary << " u " << u;
    }
  }
}

TEST(RotorLimitFactor, ActiveBranchValues) {
  factors::RotorLimitFactor f(fgo::rotor_key(0), params, unit_noise(4));
  const double lo = params.rotor_min + params.rotor_threshold;
  const double hi = params.rotor_max - params.rotor_threshold;
  fgo::Values values;
  values.insert(fgo::rotor_key(0), RotorSpeeds{{lo - 30.0, lo + 1.0, hi - 1.0, hi + 20.0}});
  const Eigen::VectorXd r = f.residual(values);
  EXPECT_DOUBLE_EQ(r(0), 30.0);
  EXPECT_DOUBLE_EQ(r(1), 0.0);
  EXPECT_DOUBLE_EQ(r(2), 0.0);
  EXPECT_DOUBLE_EQ(r(3), 20.0);
}

TEST(RotorLimitFactor, JacobianMatchesFiniteDifferencesAwayFromKinks) {
  std::mt19937 rng(46);
  const double lo = params.rotor_min + params.rotor_threshold;
  const double hi = params.rotor_max - params.rotor_threshold;
  std::uniform_real_distribution<double> wide(params.rotor_min - 100.0,
                                              params.rotor_max + 100.0);
  int done = 0;
  while (done < 50) {
    Eigen::Vector4d u{wide(rng), wide(rng), wide(rng), wide(rng)};
    bool near_kink = false;
    for (int j = 0; j < 4; ++j) {
      if (std::abs(u(j) - lo) < 1e-3 || std::abs(u(j) - hi) < 1e-3) near_kink = true;
    }
    if (near_kink) continue;
    factors::RotorLimitFactor f(fgo::rotor_key(0), params, unit_noise(4));
    fgo::Values values;
    values.insert(fgo::rotor_key(0), RotorSpeeds{u});
    EXPECT_LT(test::jacobian_mismatch(f, values), kFdTol);
    ++done;
  }
}

// ---------------------------------------------------------------------------
// Wrench rate factor

TEST(WrenchRateFactor, ZeroForEqualWrenches) {
  factors::WrenchRateFactor f(fgo::wrench_key(0), fgo::wrench_key(1), unit_noise(4));
  fgo::Values values;
  values.insert(fgo::wrench_key(0), Wrench{7.0, {0.1, 0.2, 0.3}});
  values.insert(fgo::wrench_key(1), Wrench{7.0, {0.1, 0.2, 0.3}});
  EXPECT_EQ(f.residual(values), Eigen::Vector4d::Zero());
}

TEST(WrenchRateFactor, ThrustDelta) {
  factors::WrenchRateFactor f(fgo::wrench_key(0), fgo::wrench_key(1), unit_noise(4));
  fgo::Values values;
  values.insert(fgo::wrench_key(0), Wrench{8.0, Eigen::Vector3d::Zero()});
  values.insert(fgo::wrench_key(1), Wrench{7.0, Eigen::Vector3d::Zero()});
  EXPECT_EQ(f.residual(values), Eigen::Vector4d(1.0, 0.0, 0.0, 0.0));
}

TEST(WrenchRateFactor, WhitenedNormWithPaperCovariance) {
  // Covariance diag(1.0, 0.5, 0.5, 0.5) and delta (1,1,0,0):
  // squared whitened error = 1/1.0 + 1/0.5 = 3.
  const Eigen::Vector4d cov(1.0, 0.5, 0.5, 0.5);
  factors::WrenchRateFactor f(fgo::wrench_key(0), fgo::wrench_key(1),
                              fgo::NoiseModel::from_sigmas(cov.cwiseSqrt()));
  fgo::Values values;
  values.insert(fgo::wrench_key(0), Wrench{1.0, {1.0, 0.0, 0.0}});
  values.insert(fgo::wrench_key(1), Wrench{0.0, {0.0, 0.0, 0.0}});
  EXPECT_NEAR(f.noise().whiten(f.residual(values)).squaredNorm(), 3.0, 1e-12);
}

TEST(WrenchRateFactor, JacobianMatchesFiniteDifferences) {
  std::mt19937 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    factors::WrenchRateFactor f(fgo::wrench_key(0), fgo::wrench_key(1), unit_noise(4));
    fgo::Values values;
    values.insert(fgo::wrench_key(0), test::random_wrench(rng));
    values.insert(fgo::wrench_key(1), test::random_wrench(rng));
    EXPECT_LT(test::jacobian_mismatch(f, values), kFdTol);
  }
}
