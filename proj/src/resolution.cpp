#include "isar/resolution.hpp"

#include <cmath>

namespace isar {

double bessel_j0(double x) {
    x = std::abs(x);
    if (x < 12.0) {
        const double q = 0.25 * x * x;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k <= 40; ++k) {
            term *= -q / (static_cast<double>(k) * k);
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum)) break;
        }
        return sum;
    }
    // Hankel expansion: J0 = sqrt(2/(pi x)) [P cos(chi) - Q sin(chi)], chi = x - pi/4,
    // P = 1 - a2/x^2 + a4/x^4 - ..., Q = -a1/x + a3/x^3 - ...,
    // a_k = a_{k-1} (2k-1)^2 / (8k).
    double p = 1.0, q = 0.0;
    double c = 1.0;
    double sign_p = -1.0, sign_q = -1.0;
    double prev = 1.0;
    for (int k = 1; k <= 24; ++k) {
        c *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k);
        const double term = c / std::pow(x, k);
        if (term > prev) break;  // asymptotic series started diverging
        prev = term;
        if (k % 2 == 1) {
            q += sign_q * term;
            sign_q = -sign_q;
        } else {
            p += sign_p * term;
            sign_p = -sign_p;
        }
    }
    const double chi = x - 0.25 * kPi;
    return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

double kernel_array(const Vec2& x, double omega, double aperture, double target_height) {
    if (!(aperture > 0.0) || !(target_height > 0.0))
        throw ConfigError("kernel_array needs positive aperture and target height");
    const double scale = omega / kSpeedOfLight * aperture / (2.0 * target_height);
    return aperture * aperture * sinc(scale * x.x()) * sinc(scale * x.y());
}

double kernel_effective(const Vec2& x, double omega, double aperture, double target_height,
                        const RotationParams& rotation, double aperture_time,
                        int min_nodes_per_period) {
    if (!(aperture_time > 0.0)) throw ConfigError("kernel_effective needs a positive aperture time");
    int nodes = 257;
    if (rotation.omega_r > 0.0) {
        const double periods = aperture_time / rotation.period();
        nodes = std::max(nodes, static_cast<int>(std::ceil(min_nodes_per_period * periods)) + 1);
    }
    const Vec3 x3(x.x(), x.y(), 0.0);
    const double ds = aperture_time / (nodes - 1);
    double acc = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double s = -0.5 * aperture_time + i * ds;
        const Vec3 rotated = rotation_matrix(s, rotation) * x3;
        const double w = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
        acc += w * kernel_array(rotated.head<2>(), omega, aperture, target_height);
    }
    return acc * ds;
}

double kernel_rotation_bessel(double r, double omega, double theta_rot) {
    return bessel_j0(omega / kSpeedOfLight * 2.0 * std::sin(theta_rot) * r);
}

Complex interference_pattern_approx(const Vec2& u, const Vec2& v, const Vec2& y_i,
                                    const Vec2& y_j, const VecXd& omega, const Pulse& pulse,
                                    double aperture, double target_height,
                                    const RotationParams& rotation, double aperture_time) {
    const Vec2 du = u - y_i;
    const Vec2 dv = v - y_j;
    const double separation = (du - dv).norm();
    const double dw = omega.size() > 1 ? omega(1) - omega(0) : 1.0;

    Complex acc(0.0, 0.0);
    for (int m = 0; m < omega.size(); ++m) {
        const double w = omega(m);
        const double denom = 4.0 * kPi * target_height;
        const double xi = w * w * pulse_spectrum(w, pulse) / (denom * denom);
        const double b_u = kernel_effective(du, w, aperture, target_height, rotation, aperture_time);
        const double b_v = kernel_effective(dv, w, aperture, target_height, rotation, aperture_time);
        acc += dw * xi * xi * b_u * b_v * kernel_rotation_bessel(separation, w, rotation.theta_rot);
    }
    return acc;
}

}  // namespace isar
