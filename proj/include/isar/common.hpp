#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace isar {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecXd = Eigen::VectorXd;
using VecXcd = Eigen::VectorXcd;
using MatXd = Eigen::MatrixXd;
using MatXcd = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Speed of light in vacuum [m/s]. All positions are meters, all times seconds.
inline constexpr double kSpeedOfLight = 299'792'458.0;

inline constexpr double kPi = 3.14159265358979323846;

/// Base error for the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid or inconsistent configuration / input values.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Degenerate geometry (coincident points, zero directions).
class GeometryError : public Error {
public:
    explicit GeometryError(const std::string& what) : Error(what) {}
};

/// A pipeline stage could not produce a result (no peaks, empty data, ...).
class StageError : public Error {
public:
    StageError(const std::string& stage, const std::string& what)
        : Error(stage + ": " + what), stage_(stage) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

/// sin(u)/u with the removable singularity filled in.
inline double sinc(double u) {
    if (std::abs(u) < 1e-8) return 1.0 - u * u / 6.0;
    return std::sin(u) / u;
}

/// Wrap an angle into (-pi/2, pi/2]; residuals of the rotation loss live there.
inline double wrap_half_pi(double x) {
    const double w = x - kPi * std::round(x / kPi);
    return (w <= -kPi / 2.0) ? w + kPi : w;
}

/// Wrap an angle into [0, 2*pi).
inline double wrap_two_pi(double x) {
    double w = std::fmod(x, 2.0 * kPi);
    if (w < 0) w += 2.0 * kPi;
    return w;
}

}  // namespace isar
