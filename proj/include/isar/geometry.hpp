#pragma once

#include <vector>

#include "isar/common.hpp"

namespace isar {

/// Orientation and rate of the body's rotation axis.
/// theta_rot/phi_rot are the solid angles of the axis relative to z,
/// omega_r >= 0 is the counter-clockwise angular rate about that axis.
struct RotationParams {
    double theta_rot = 0.0;  // [0, pi]
    double phi_rot = 0.0;    // [0, 2*pi)
    double omega_r = 0.0;    // [rad/s], >= 0

    void validate() const;
    /// Period 2*pi/omega_r; infinity when omega_r == 0.
    double period() const;
};

/// Linear motion of the rotation center: position(s) = position0 + s*velocity.
struct Trajectory {
    Vec3 position0 = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();

    Vec3 position(double s) const { return position0 + s * velocity; }
};

/// Emitter plus the receiver network. Receivers lie in the plane z = receiver_height.
struct ArrayLayout {
    Vec3 emitter = Vec3::Zero();
    std::vector<Vec3> receivers;
    double receiver_height = 0.0;    // [m]
    double aperture_diameter = 0.0;  // [m], side of the area receivers span

    void validate() const;
    int receiver_count() const { return static_cast<int>(receivers.size()); }
};

/// Point scatterers in the rotating body frame: planar offsets (z = 0) and
/// real reflectivities.
struct Scene {
    std::vector<Vec3> offsets;
    std::vector<double> reflectivity;

    void validate() const;
    int size() const { return static_cast<int>(offsets.size()); }
    bool empty() const { return offsets.empty(); }
};

/// In-plane rotation by `angle` about the z axis.
Mat3 rotation_z(double angle);

/// Frame transform taking the rotation plane back to xyz coordinates.
Mat3 rotation_frame(double phi, double theta);

/// R(s) = R_frame(phi, theta) * R_z(omega_r * s). Orthogonal, det +1.
Mat3 rotation_matrix(double s, const RotationParams& p);

/// Unit direction of the rotation axis in xyz coordinates.
Vec3 rotation_axis(const RotationParams& p);

/// Inertial position of a body-frame offset at slow time s.
Vec3 scatterer_position(double s, const Trajectory& traj, const RotationParams& p,
                        const Vec3& offset);

/// First-order Doppler scale factor gamma for a scatterer at x moving with
/// `velocity`, observed on the emitter->x->receiver path.
double doppler_factor(const Vec3& x, const Vec3& emitter, const Vec3& receiver,
                      const Vec3& velocity);
double doppler_factor(const Vec3& x, const ArrayLayout& layout, int receiver_index,
                      const Vec3& velocity);

/// Bistatic travel time |x-x_E|/c0 + |x-x_R|/c0 * gamma.
double travel_time(const Vec3& x, const Vec3& emitter, const Vec3& receiver,
                   const Vec3& velocity);
double travel_time(const Vec3& x, const ArrayLayout& layout, int receiver_index,
                   const Vec3& velocity);

/// Travel time of the rotated offset relative to the rotation center:
/// travel_time(x_L(s) + R(s)*offset) - travel_time(x_L(s)).
double reduced_travel_time(double s, const Trajectory& traj, const RotationParams& p,
                           const Vec3& offset, const Vec3& emitter, const Vec3& receiver,
                           const Vec3& velocity);
double reduced_travel_time(double s, const Trajectory& traj, const RotationParams& p,
                           const Vec3& offset, const ArrayLayout& layout, int receiver_index,
                           const Vec3& velocity);

}  // namespace isar
