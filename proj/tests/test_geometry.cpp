#include <doctest.h>

#include "isar/geometry.hpp"
#include "oracles.hpp"

using namespace isar;

namespace {

ArrayLayout overhead_layout() {
    ArrayLayout layout;
    layout.emitter = Vec3(0.0, 0.0, 0.0);
    layout.receivers = {Vec3(0.0, 0.0, 0.0), Vec3(15e3, 0.0, 0.0)};
    layout.receiver_height = 0.0;
    layout.aperture_diameter = 30e3;
    return layout;
}

ArrayLayout paper_layout() {
    ArrayLayout layout;
    layout.emitter = Vec3(-25e3, 10e3, 0.0);
    layout.receivers = {Vec3(-40e3, 55e3, 15e3), Vec3(70e3, -20e3, 15e3),
                        Vec3(5e3, 90e3, 15e3)};
    layout.receiver_height = 15e3;
    layout.aperture_diameter = 200e3;
    return layout;
}

const Trajectory kPaperTrajectory{Vec3(0.0, 0.0, 500e3), Vec3(7600.0, 0.0, 0.0)};

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("rotation matrix identity and periodicity") {
    RotationParams p{0.0, 0.0, 1.7};
    CHECK((rotation_matrix(0.0, p) - Mat3::Identity()).norm() == doctest::Approx(0.0));

    RotationParams spin{1.1, 0.4, 2.0 * kPi / 5.0};
    const Mat3 full_period = rotation_matrix(5.0, spin);
    CHECK((full_period - rotation_matrix(0.0, spin)).norm() < 1e-10);

    auto g = oracle::rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        RotationParams q{oracle::uniform(g, 0.0, kPi), oracle::uniform(g, 0.0, 2.0 * kPi),
                         oracle::uniform(g, 0.1, 3.0)};
        const double s = oracle::uniform(g, -20.0, 20.0);
        CHECK((rotation_matrix(s + q.period(), q) - rotation_matrix(s, q)).norm() < 1e-10);
    }
}

TEST_CASE("rotation matrix is orthogonal with determinant +1") {
    auto g = oracle::rng(7);
    for (int trial = 0; trial < 10000; ++trial) {
        RotationParams p{oracle::uniform(g, 0.0, kPi), oracle::uniform(g, 0.0, 2.0 * kPi),
                         oracle::uniform(g, 0.0, 4.0)};
        const double s = oracle::uniform(g, -30.0, 30.0);
        const Mat3 r = rotation_matrix(s, p);
        CHECK((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("rotation matrix against independent matrix-product oracle") {
    RotationParams p{kPi / 2.0, 0.0, 1.0};
    const Mat3 lib = rotation_matrix(kPi / 2.0, p);
    const Mat3 ref = oracle::rotation_matrix(kPi / 2.0, p.theta_rot, p.phi_rot, p.omega_r);
    CHECK((lib - ref).cwiseAbs().maxCoeff() < 1e-14);

    auto g = oracle::rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        RotationParams q{oracle::uniform(g, 0.0, kPi), oracle::uniform(g, 0.0, 2.0 * kPi),
                         oracle::uniform(g, 0.0, 3.0)};
        const double s = oracle::uniform(g, -10.0, 10.0);
        const Mat3 ref_q = oracle::rotation_matrix(s, q.theta_rot, q.phi_rot, q.omega_r);
        CHECK((rotation_matrix(s, q) - ref_q).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("applying then inverting the frame rotation recovers the input") {
    RotationParams p{2.0, 5.0, 0.7};
    const Mat3 r = rotation_matrix(0.0, p);
    const Vec3 v(0.3, -1.2, 2.5);
    CHECK(((r.transpose() * (r * v)) - v).norm() < 1e-12 * v.norm());
}

TEST_CASE("scatterer position reduces to the trajectory at zero offset") {
    RotationParams p{2.2, 1.0, 1.3};
    for (double s : {-3.0, 0.0, 4.5}) {
        const Vec3 pos = scatterer_position(s, kPaperTrajectory, p, Vec3::Zero());
        CHECK((pos - kPaperTrajectory.position(s)).norm() == doctest::Approx(0.0));
    }
}

TEST_CASE("scatterer position without rotation translates rigidly") {
    RotationParams frozen{1.0, 2.0, 0.0};
    const Vec3 offset(0.0, 0.15, 0.0);
    const Vec3 p0 = scatterer_position(0.0, kPaperTrajectory, frozen, offset);
    const Vec3 p1 = scatterer_position(2.5, kPaperTrajectory, frozen, offset);
    CHECK((p1 - p0 - 2.5 * kPaperTrajectory.velocity).norm() < 1e-9);
}

TEST_CASE("quarter-period rotation of the paper offset matches the matrix oracle") {
    RotationParams p{kPi / 2.0, 0.0, 2.0 * kPi / 5.0};
    const double s = 1.25;  // quarter period
    const Vec3 offset(0.0, 0.15, 0.0);
    const Vec3 lib = scatterer_position(s, kPaperTrajectory, p, offset);
    const Vec3 ref = kPaperTrajectory.position(s) +
                     oracle::rotation_matrix(s, p.theta_rot, p.phi_rot, p.omega_r) * offset;
    CHECK((lib - ref).norm() < 1e-12);
}

TEST_CASE("doppler factor trivial cases") {
    const ArrayLayout layout = paper_layout();
    const Vec3 x(0.0, 0.0, 500e3);
    CHECK(doppler_factor(x, layout, 0, Vec3::Zero()) == doctest::Approx(1.0).epsilon(1e-15));

    // Velocity transverse to both lines of sight (overhead, colocated path).
    const Vec3 origin = Vec3::Zero();
    const Vec3 transverse(0.0, 7600.0, 0.0);
    const Vec3 overhead(0.0, 0.0, 500e3);
    CHECK(doppler_factor(overhead, origin, origin, transverse) ==
          doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("doppler factor against hand-computed unit vectors") {
    const Vec3 x(0.0, 0.0, 500e3);
    const Vec3 origin = Vec3::Zero();
    const Vec3 v(7600.0, 0.0, 0.0);
    CHECK(doppler_factor(x, origin, origin, v) == doctest::Approx(1.0).epsilon(1e-15));

    const Vec3 rcv(15e3, 0.0, 0.0);
    const Vec3 de = (x - origin).normalized();
    const Vec3 dr = (x - rcv).normalized();
    const double expected = 1.0 - v.dot(de + dr) / kSpeedOfLight;
    CHECK(doppler_factor(x, origin, rcv, v) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(std::abs(doppler_factor(x, origin, rcv, v) - 1.0) <= 2.0 * v.norm() / kSpeedOfLight);
}

TEST_CASE("doppler factor bound holds for random configurations") {
    auto g = oracle::rng(31);
    const ArrayLayout layout = paper_layout();
    for (int trial = 0; trial < 1000; ++trial) {
        const Vec3 x(oracle::uniform(g, -200e3, 200e3), oracle::uniform(g, -200e3, 200e3),
                     oracle::uniform(g, 300e3, 800e3));
        const Vec3 v(oracle::uniform(g, -8e3, 8e3), oracle::uniform(g, -8e3, 8e3),
                     oracle::uniform(g, -1e3, 1e3));
        const double gamma = doppler_factor(x, layout, trial % 3, v);
        CHECK(std::abs(gamma - 1.0) <= 2.0 * v.norm() / kSpeedOfLight + 1e-15);
    }
}

TEST_CASE("coincident points raise a geometry error") {
    const ArrayLayout layout = paper_layout();
    CHECK_THROWS_AS(doppler_factor(layout.emitter, layout, 0, Vec3::Zero()), GeometryError);
    CHECK_THROWS_AS(travel_time(layout.receivers[1], layout, 1, Vec3::Zero()), GeometryError);
}

TEST_CASE("travel time round trip and bistatic reduction") {
    ArrayLayout colocated = overhead_layout();
    const Vec3 x(0.0, 0.0, kSpeedOfLight);
    CHECK(travel_time(x, colocated, 0, Vec3::Zero()) == doctest::Approx(2.0).epsilon(1e-15));

    auto g = oracle::rng(5);
    const ArrayLayout layout = paper_layout();
    for (int trial = 0; trial < 300; ++trial) {
        const Vec3 p(oracle::uniform(g, -100e3, 100e3), oracle::uniform(g, -100e3, 100e3),
                     oracle::uniform(g, 400e3, 600e3));
        const int r = trial % 3;
        const double bistatic =
            ((p - layout.emitter).norm() + (p - layout.receivers[r]).norm()) / kSpeedOfLight;
        CHECK(travel_time(p, layout, r, Vec3::Zero()) ==
              doctest::Approx(bistatic).epsilon(1e-15));
    }
}

TEST_CASE("travel time against extended-precision oracle at paper geometry") {
    const ArrayLayout layout = paper_layout();
    const Vec3 v(7600.0, 0.0, 0.0);
    for (int r = 0; r < 3; ++r) {
        const Vec3 x(12.0e3, -7.0e3, 500e3);
        const double lib = travel_time(x, layout, r, v);
        const long double ref = oracle::travel_time_ld(x, layout.emitter, layout.receivers[r], v);
        CHECK(lib == doctest::Approx(static_cast<double>(ref)).epsilon(1e-14));
        CHECK(lib > 3e-3);
        CHECK(lib < 4e-3);
    }
}

TEST_CASE("reduced travel time vanishes at the center and respects its bound") {
    const ArrayLayout layout = paper_layout();
    RotationParams p{0.75 * kPi, 0.25 * kPi, 2.0 * kPi / 5.0};
    const Vec3 v(7600.0, 0.0, 0.0);

    CHECK(reduced_travel_time(1.0, kPaperTrajectory, p, Vec3::Zero(), layout, 0, v) == 0.0);

    auto g = oracle::rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec3 offset(oracle::uniform(g, -0.5, 0.5), oracle::uniform(g, -0.5, 0.5), 0.0);
        const double s = oracle::uniform(g, -3.0, 3.0);
        const int r = trial % 3;
        const double dt = reduced_travel_time(s, kPaperTrajectory, p, offset, layout, r, v);
        const double bound =
            2.0 * offset.norm() / kSpeedOfLight * (1.0 + v.norm() / kSpeedOfLight) + 1e-18;
        CHECK(std::abs(dt) <= bound);
    }
}

TEST_CASE("reduced travel time sign flip cancels to second order") {
    ArrayLayout layout = overhead_layout();
    layout.receivers = {Vec3(0.0, 0.0, 0.0), Vec3(0.0, 1.0, 0.0)};
    RotationParams p{kPi / 2.0, 0.0, 1.0};
    const Trajectory traj{Vec3(0.0, 0.0, 500e3), Vec3::Zero()};
    const Vec3 offset(0.0, 0.3, 0.0);

    const double plus = reduced_travel_time(0.3, traj, p, offset, layout, 0, Vec3::Zero());
    const double minus = reduced_travel_time(0.3, traj, p, -offset, layout, 0, Vec3::Zero());
    const double residual_bound = 10.0 * offset.squaredNorm() / (kSpeedOfLight * 500e3);
    CHECK(std::abs(plus + minus) <= residual_bound);
}

TEST_CASE("first-order delay approximation matches the exact difference") {
    const ArrayLayout layout = paper_layout();
    RotationParams p{0.75 * kPi, 0.25 * kPi, 2.0 * kPi / 5.0};
    const Vec3 v(7600.0, 0.0, 0.0);
    auto g = oracle::rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec3 offset(oracle::uniform(g, -0.6, 0.6), oracle::uniform(g, -0.6, 0.6), 0.0);
        const double s = oracle::uniform(g, -3.0, 3.0);
        const int r = trial % 3;
        const Vec3 center = kPaperTrajectory.position(s);
        const Vec3 rotated = rotation_matrix(s, p) * offset;
        const Vec3 unit_e = (center - layout.emitter).normalized();
        const Vec3 unit_r = (center - layout.receivers[r]).normalized();
        const double approx = rotated.dot(unit_e + unit_r) / kSpeedOfLight;
        const double exact = reduced_travel_time(s, kPaperTrajectory, p, offset, layout, r, v);
        const double range = (center - layout.receivers[r]).norm();
        const double bound = 10.0 * (offset.squaredNorm() / range +
                                     2.0 * v.norm() * offset.norm() / kSpeedOfLight) /
                             kSpeedOfLight;
        CHECK(std::abs(exact - approx) <= bound);
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS((RotationParams{4.0, 0.0, 1.0}.validate()), ConfigError);
    CHECK_THROWS_AS((RotationParams{1.0, -0.1, 1.0}.validate()), ConfigError);
    CHECK_THROWS_AS((RotationParams{1.0, 0.0, -1.0}.validate()), ConfigError);
    CHECK_NOTHROW((RotationParams{kPi, 0.0, 0.0}.validate()));

    ArrayLayout bad = paper_layout();
    bad.receivers[1].z() = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    Scene tilted;
    tilted.offsets = {Vec3(0.0, 0.1, 0.2)};
    tilted.reflectivity = {1.0};
    CHECK_THROWS_AS(tilted.validate(), ConfigError);
}

}  // TEST_SUITE
