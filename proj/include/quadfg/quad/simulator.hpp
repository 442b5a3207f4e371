// Ground-truth simulator and sensor model. The simulator integrates with RK4
// (one order above the Euler model used by the dynamics factor) and injects
// Gaussian noise on the commanded thrust and on the post-integration body
// rate. The sensor model perturbs every state block, with rotation noise
// applied as a right tangent perturbation.

#pragma once

#include <Eigen/Core>

#include <random>

#include "quadfg/quad/allocation.hpp"
#include "quadfg/quad/dynamics.hpp"

namespace quadfg::quad {

/// One standard normal draw. A fresh distribution object per call keeps the
/// engine-consumption pattern independent of any internal caching.
inline double gauss(std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

inline Eigen::Vector3d gauss3(std::mt19937_64& rng) {
  return {gauss(rng), gauss(rng), gauss(rng)};
}

struct ProcessNoise {
  double thrust_sigma = 0.0;  // N
  double rate_sigma = 0.0;    // rad/s, per step
};

struct MeasurementNoise {
  double pos_sigma = 0.0;   // m
  double rot_sigma = 0.0;   // rad
  double vel_sigma = 0.0;   // m/s
  double rate_sigma = 0.0;  // rad/s
};

inline QuadState step_truth(const QuadState& x, const RotorSpeeds& u, double dt,
                            const ProcessNoise& noise, std::mt19937_64& rng,
                            const QuadParams& params) {
  Wrench w = allocate(u, params);
  if (noise.thrust_sigma > 0.0) {
    w.thrust += noise.thrust_sigma * gauss(rng);
  }
  QuadState next = integrate_rk4(x, w, dt, params);
  if (noise.rate_sigma > 0.0) {
    next.body_rate += noise.rate_sigma * gauss3(rng);
  }
  return next;
}

inline QuadState measure(const QuadState& x, const MeasurementNoise& noise,
                         std::mt19937_64& rng) {
  QuadState z = x;
  if (noise.pos_sigma > 0.0) z.position += noise.pos_sigma * gauss3(rng);
  if (noise.rot_sigma > 0.0) z.rotation = z.rotation * so3::exp(noise.rot_sigma * gauss3(rng));
  if (noise.vel_sigma > 0.0) z.velocity += noise.vel_sigma * gauss3(rng);
  if (noise.rate_sigma > 0.0) z.body_rate += noise.rate_sigma * gauss3(rng);
  return z;
}

}  // namespace quadfg::quad
