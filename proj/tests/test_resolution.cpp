#include <doctest.h>

#include "isar/resolution.hpp"
#include "oracles.hpp"

using namespace isar;

namespace {

// Quadrature identity: J0(x) = (1/2pi) int_0^{2pi} exp(i x cos(phi)) dphi.
double j0_quadrature(double x) {
    const int n = 4096;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double phi = 2.0 * kPi * i / n;
        acc += std::cos(x * std::cos(phi));
    }
    return acc / n;
}

constexpr double kCarrier = 9.6e9;
constexpr double kOmega = 2.0 * kPi * kCarrier;
constexpr double kAperture = 200e3;
constexpr double kHeight = 500e3;

}  // namespace

TEST_SUITE("resolution") {

TEST_CASE("J0 at zero and its first kernel zero") {
    CHECK(bessel_j0(0.0) == 1.0);
    // first zero of J0 sits at 2.404825557695773
    double lo = 2.0, hi = 3.0;
    for (int iter = 0; iter < 80; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (bessel_j0(lo) * bessel_j0(mid) <= 0.0) hi = mid;
        else lo = mid;
    }
    CHECK(0.5 * (lo + hi) == doctest::Approx(2.404825557695773).epsilon(1e-10));
}

TEST_CASE("J0 against the quadrature identity over series and asymptotic ranges") {
    for (int i = 0; i < 1000; ++i) {
        const double x = 60.0 * i / 999.0;
        CHECK(std::abs(bessel_j0(x) - j0_quadrature(x)) <= 1e-10);
    }
}

TEST_CASE("array kernel peak, first zero, and symmetry") {
    CHECK(kernel_array(Vec2(0.0, 0.0), kOmega, kAperture, kHeight) ==
          doctest::Approx(kAperture * kAperture));

    // first zero along x1 at lambda * H_T / a (about 7.8 cm here)
    const double lambda = kSpeedOfLight / kCarrier;
    const double lobe = lambda * kHeight / kAperture;
    double lo = 0.8 * lobe, hi = 1.2 * lobe;
    for (int iter = 0; iter < 80; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (kernel_array(Vec2(lo, 0.0), kOmega, kAperture, kHeight) *
                kernel_array(Vec2(mid, 0.0), kOmega, kAperture, kHeight) <=
            0.0)
            hi = mid;
        else
            lo = mid;
    }
    CHECK(0.5 * (lo + hi) == doctest::Approx(lobe).epsilon(0.02));

    auto g = oracle::rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec2 x(oracle::uniform(g, -0.3, 0.3), oracle::uniform(g, -0.3, 0.3));
        const double v = kernel_array(x, kOmega, kAperture, kHeight);
        CHECK(kernel_array(Vec2(-x.x(), x.y()), kOmega, kAperture, kHeight) == v);
        CHECK(kernel_array(Vec2(x.x(), -x.y()), kOmega, kAperture, kHeight) == v);
    }

    CHECK_THROWS_AS(kernel_array(Vec2(0.0, 0.0), kOmega, -1.0, kHeight), ConfigError);
}

TEST_CASE("array kernel matches a dense uniform receiver sum") {
    const int side = 15;  // 225 receivers
    auto discrete = [&](const Vec2& x) {
        Complex acc(0.0, 0.0);
        for (int iy = 0; iy < side; ++iy)
            for (int ix = 0; ix < side; ++ix) {
                const Vec2 r(((ix + 0.5) / side - 0.5) * kAperture,
                             ((iy + 0.5) / side - 0.5) * kAperture);
                acc += std::polar(1.0, -kOmega / kSpeedOfLight / kHeight * r.dot(x));
            }
        return std::abs(acc) / (side * side);
    };
    const double lambda = kSpeedOfLight / kCarrier;
    const double lobe = lambda * kHeight / kAperture;
    for (double f : {0.0, 0.2, 0.4, 0.6}) {
        const Vec2 x(f * lobe, -0.5 * f * lobe);
        const double cont = std::abs(kernel_array(x, kOmega, kAperture, kHeight)) /
                            (kAperture * kAperture);
        CHECK(std::abs(discrete(x) - cont) <= 0.05);
    }
}

TEST_CASE("effective kernel: frozen rotation and polar symmetry at theta = pi") {
    const RotationParams frozen{0.75 * kPi, 0.3, 0.0};
    const double s_total = 6.0;
    const Vec2 x(0.03, -0.02);
    const Vec3 rotated = rotation_matrix(0.0, frozen) * Vec3(x.x(), x.y(), 0.0);
    const double expected =
        s_total * kernel_array(rotated.head<2>(), kOmega, kAperture, kHeight);
    CHECK(kernel_effective(x, kOmega, kAperture, kHeight, frozen, s_total) ==
          doctest::Approx(expected).epsilon(1e-12));

    const RotationParams vertical{kPi, 0.0, 2.0 * kPi / 5.0};
    const double r = 0.05;
    const double base = kernel_effective(Vec2(r, 0.0), kOmega, kAperture, kHeight, vertical, 5.0);
    for (double ang : {0.4, 1.1, 2.7}) {
        const double v = kernel_effective(Vec2(r * std::cos(ang), r * std::sin(ang)), kOmega,
                                          kAperture, kHeight, vertical, 5.0);
        CHECK(v == doctest::Approx(base).epsilon(1e-6));
    }
}

TEST_CASE("effective kernel keeps its main lobe but decays slower as theta drops") {
    const double s_total = 5.0;
    auto half_width = [&](double theta) {
        const RotationParams rot{theta, 0.25 * kPi, 2.0 * kPi / 5.0};
        const double peak = kernel_effective(Vec2(0.0, 0.0), kOmega, kAperture, kHeight, rot,
                                             s_total);
        double x = 0.0;
        while (kernel_effective(Vec2(x, 0.0), kOmega, kAperture, kHeight, rot, s_total) >
               0.5 * peak)
            x += 0.002;
        return x;
    };
    auto tail_level = [&](double theta) {
        const RotationParams rot{theta, 0.25 * kPi, 2.0 * kPi / 5.0};
        const double peak =
            kernel_effective(Vec2(0.0, 0.0), kOmega, kAperture, kHeight, rot, s_total);
        double acc = 0.0;
        int n = 0;
        for (double x = 0.12; x <= 0.3; x += 0.01) {
            acc += std::abs(
                kernel_effective(Vec2(x, 0.0), kOmega, kAperture, kHeight, rot, s_total));
            ++n;
        }
        return acc / n / peak;
    };

    const double w_pi = half_width(kPi);
    const double w_34 = half_width(0.75 * kPi);
    const double w_12 = half_width(0.5 * kPi);
    CHECK(w_34 == doctest::Approx(w_pi).epsilon(0.5));
    CHECK(w_12 == doctest::Approx(w_pi).epsilon(0.8));
    CHECK(tail_level(0.75 * kPi) >= tail_level(kPi) * 0.9);
    CHECK(tail_level(0.5 * kPi) > tail_level(kPi));
}

TEST_CASE("rotation kernel scale gives the lambda/(2 sin theta) spot") {
    const double theta = 0.75 * kPi;
    CHECK(kernel_rotation_bessel(0.0, kOmega, theta) == 1.0);
    // the kernel's first zero maps to r = 2.408 * c0 / (2 w sin theta)
    const double r_zero = 2.404825557695773 * kSpeedOfLight / (2.0 * kOmega * std::sin(theta));
    CHECK(kernel_rotation_bessel(r_zero, kOmega, theta) ==
          doctest::Approx(0.0).epsilon(1e-9));
    const double lambda = kSpeedOfLight / kCarrier;
    CHECK(2.0 * r_zero == doctest::Approx((2.404825557695773 / kPi) * lambda /
                                          (2.0 * std::sin(theta))).epsilon(1e-12));
}

TEST_CASE("approximate interference pattern: peak value and anisotropy") {
    Pulse pulse;
    pulse.carrier_hz = 2.4e9;
    pulse.bandwidth_hz = 311e6;
    pulse.spacing_s = 0.015;
    pulse.num_pulses = 2;
    const RotationParams rot{0.75 * kPi, 0.25 * kPi, 2.0 * kPi / 5.0};
    const double s_total = 5.0;
    const VecXd omega = frequency_grid(pulse, 9, 1.0);
    const Vec2 yi(0.0, 0.0), yj(0.0, 0.0);

    const Complex on_peak = interference_pattern_approx(yi, yj, yi, yj, omega, pulse, kAperture,
                                                        kHeight, rot, s_total);
    double expected = 0.0;
    const double dw = omega(1) - omega(0);
    for (int m = 0; m < omega.size(); ++m) {
        const double denom = 4.0 * kPi * kHeight;
        const double xi = omega(m) * omega(m) * pulse_spectrum(omega(m), pulse) / (denom * denom);
        const double beff =
            kernel_effective(Vec2(0.0, 0.0), omega(m), kAperture, kHeight, rot, s_total);
        expected += dw * xi * xi * beff * beff;
    }
    CHECK(on_peak.real() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(on_peak.imag() == 0.0);

    // half decay along u - v (rotation-limited) happens much sooner than along
    // u + v (array-limited)
    auto profile = [&](const Vec2& du, const Vec2& dv) {
        return std::abs(interference_pattern_approx(du, dv, yi, yj, omega, pulse, kAperture,
                                                    kHeight, rot, s_total));
    };
    const double peak = std::abs(on_peak);
    double r_anti = 0.0, r_common = 0.0;
    for (double r = 0.002; r < 0.5; r += 0.002) {
        if (r_anti == 0.0 && profile(Vec2(r, 0.0), Vec2(-r, 0.0)) < 0.5 * peak) r_anti = r;
        if (r_common == 0.0 && profile(Vec2(r, 0.0), Vec2(r, 0.0)) < 0.5 * peak) r_common = r;
        if (r_anti > 0.0 && r_common > 0.0) break;
    }
    CHECK(r_anti > 0.0);
    CHECK(r_common > 3.0 * r_anti);
}

TEST_CASE("on the diagonal the rotation kernel depends only on the scene pair") {
    // u = v: the Bessel argument freezes at |y_j - y_i|, so the pattern is
    // proportional to B_eff(u - y_i) B_eff(u - y_j).
    Pulse pulse;
    pulse.carrier_hz = 2.4e9;
    pulse.bandwidth_hz = 311e6;
    pulse.spacing_s = 0.015;
    pulse.num_pulses = 2;
    const RotationParams rot{0.7 * kPi, 0.1, 2.0 * kPi / 5.0};
    const double s_total = 5.0;
    const VecXd omega = frequency_grid(pulse, 2, 1.0).head(1);
    const Vec2 yi(0.02, 0.0), yj(-0.02, 0.01);

    auto ratio = [&](const Vec2& u) {
        const double pattern = std::abs(interference_pattern_approx(u, u, yi, yj, omega, pulse,
                                                                    kAperture, kHeight, rot,
                                                                    s_total));
        const double beff =
            std::abs(kernel_effective(u - yi, omega(0), kAperture, kHeight, rot, s_total) *
                     kernel_effective(u - yj, omega(0), kAperture, kHeight, rot, s_total));
        return pattern / beff;
    };
    const double base = ratio(Vec2(0.0, 0.0));
    for (const Vec2& u : {Vec2(0.01, 0.01), Vec2(-0.03, 0.02), Vec2(0.05, -0.04)})
        CHECK(ratio(u) == doctest::Approx(base).epsilon(1e-9));
}

}  // TEST_SUITE
