#pragma once

#include "isar/waveform.hpp"

namespace isar {

/// Zeroth-order Bessel function of the first kind. Power series below |x| = 12,
/// Hankel asymptotic expansion above; absolute accuracy ~1e-12.
double bessel_j0(double x);

/// Continuum receiver-array point spread function
/// B_A(x) = a^2 sinc(w a x1 / (2 c0 H_T)) sinc(w a x2 / (2 c0 H_T)).
double kernel_array(const Vec2& x, double omega, double aperture, double target_height);

/// Rotation-averaged array kernel B_eff(x) = int_{-S/2}^{S/2} B_A(R(s) x) ds,
/// trapezoid quadrature with at least `min_nodes_per_period` nodes per
/// rotation period (and at least 257 overall).
double kernel_effective(const Vec2& x, double omega, double aperture, double target_height,
                        const RotationParams& rotation, double aperture_time,
                        int min_nodes_per_period = 256);

/// Rotation-phase kernel J0((w/c0) * 2 sin(theta_rot) * r).
double kernel_rotation_bessel(double r, double omega, double theta_rot);

/// Closed-form approximation of one (i, j) term of the interference pattern at
/// search points (u, v):
///   sum_w dw |xi(w)|^2 B_eff(u - y_i) B_eff(v - y_j) J0((w/c0) 2 sin(theta) |(u-y_i)-(v-y_j)|).
Complex interference_pattern_approx(const Vec2& u, const Vec2& v, const Vec2& y_i,
                                    const Vec2& y_j, const VecXd& omega, const Pulse& pulse,
                                    double aperture, double target_height,
                                    const RotationParams& rotation, double aperture_time);

}  // namespace isar
