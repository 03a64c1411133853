#include "isar/geometry.hpp"

#include <cmath>
#include <limits>

namespace isar {

void RotationParams::validate() const {
    if (!(theta_rot >= 0.0 && theta_rot <= kPi))
        throw ConfigError("rotation.theta must lie in [0, pi], got " + std::to_string(theta_rot));
    if (!(phi_rot >= 0.0 && phi_rot < 2.0 * kPi))
        throw ConfigError("rotation.phi must lie in [0, 2*pi), got " + std::to_string(phi_rot));
    if (!(omega_r >= 0.0))
        throw ConfigError("rotation.omega must be >= 0, got " + std::to_string(omega_r));
}

double RotationParams::period() const {
    if (omega_r <= 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 * kPi / omega_r;
}

void ArrayLayout::validate() const {
    if (receivers.size() < 2) throw ConfigError("layout needs at least 2 receivers");
    for (const Vec3& r : receivers) {
        if (std::abs(r.z() - receiver_height) > 1e-6)
            throw ConfigError("receiver array must be planar at z = receiver_height");
    }
    if (!(aperture_diameter > 0.0)) throw ConfigError("aperture_diameter must be > 0");
}

void Scene::validate() const {
    if (offsets.size() != reflectivity.size())
        throw ConfigError("scene offsets and reflectivities differ in length");
    for (const Vec3& y : offsets) {
        if (y.z() != 0.0)
            throw ConfigError("scatterer offsets must be planar (z = 0) in the body frame");
    }
}

Mat3 rotation_z(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 m;
    m << c, -s, 0.0,
         s,  c, 0.0,
         0.0, 0.0, 1.0;
    return m;
}

Mat3 rotation_frame(double phi, double theta) {
    const double ct = std::cos(theta), st = std::sin(theta);
    Mat3 tilt;
    tilt << ct, 0.0, -st,
            0.0, 1.0, 0.0,
            st, 0.0, ct;
    return rotation_z(phi) * tilt;
}

Mat3 rotation_matrix(double s, const RotationParams& p) {
    return rotation_frame(p.phi_rot, p.theta_rot) * rotation_z(p.omega_r * s);
}

Vec3 rotation_axis(const RotationParams& p) {
    return rotation_frame(p.phi_rot, p.theta_rot) * Vec3::UnitZ();
}

Vec3 scatterer_position(double s, const Trajectory& traj, const RotationParams& p,
                        const Vec3& offset) {
    return traj.position(s) + rotation_matrix(s, p) * offset;
}

double doppler_factor(const Vec3& x, const Vec3& emitter, const Vec3& receiver,
                      const Vec3& velocity) {
    const Vec3 de = x - emitter;
    const Vec3 dr = x - receiver;
    const double ne = de.norm(), nr = dr.norm();
    if (ne == 0.0 || nr == 0.0)
        throw GeometryError("target position coincides with emitter or receiver");
    return 1.0 - velocity.dot(de / ne + dr / nr) / kSpeedOfLight;
}

double doppler_factor(const Vec3& x, const ArrayLayout& layout, int receiver_index,
                      const Vec3& velocity) {
    return doppler_factor(x, layout.emitter, layout.receivers.at(receiver_index), velocity);
}

double travel_time(const Vec3& x, const Vec3& emitter, const Vec3& receiver,
                   const Vec3& velocity) {
    const double gamma = doppler_factor(x, emitter, receiver, velocity);
    return (x - emitter).norm() / kSpeedOfLight +
           (x - receiver).norm() / kSpeedOfLight * gamma;
}

double travel_time(const Vec3& x, const ArrayLayout& layout, int receiver_index,
                   const Vec3& velocity) {
    return travel_time(x, layout.emitter, layout.receivers.at(receiver_index), velocity);
}

double reduced_travel_time(double s, const Trajectory& traj, const RotationParams& p,
                           const Vec3& offset, const Vec3& emitter, const Vec3& receiver,
                           const Vec3& velocity) {
    const Vec3 center = traj.position(s);
    const Vec3 rotated = center + rotation_matrix(s, p) * offset;
    return travel_time(rotated, emitter, receiver, velocity) -
           travel_time(center, emitter, receiver, velocity);
}

double reduced_travel_time(double s, const Trajectory& traj, const RotationParams& p,
                           const Vec3& offset, const ArrayLayout& layout, int receiver_index,
                           const Vec3& velocity) {
    return reduced_travel_time(s, traj, p, offset, layout.emitter,
                               layout.receivers.at(receiver_index), velocity);
}

}  // namespace isar
