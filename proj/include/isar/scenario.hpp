#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isar/migration.hpp"
#include "isar/rotation_estimation.hpp"

namespace isar {

enum class RotationSource { kTruth, kEstimate, kNone };

/// Parsed experiment description. One key = value per line, '#' comments,
/// unknown keys rejected. All units SI (meters, seconds, Hz, radians).
struct ScenarioConfig {
    // geometry
    Vec3 emitter = Vec3(-25e3, 10e3, 0.0);
    double receiver_height = 15e3;
    double receiver_area = 200e3;  // side of the square the receivers span
    std::string receiver_mode = "random";  // random | grid | explicit
    int receiver_count = 15;
    std::uint64_t receiver_seed = 1;
    std::vector<Vec3> receivers_explicit;

    // trajectory (window center; also the Doppler reference x0, v0)
    Vec3 target_position = Vec3(0.0, 0.0, 500e3);
    Vec3 target_velocity = Vec3(7600.0, 0.0, 0.0);

    // rotation truth
    RotationParams rotation;
    Vec3 rotation_center_offset = Vec3::Zero();

    // scene
    std::vector<Vec2> scatterers;
    std::vector<double> reflectivities;

    // pulse & synthesis
    Pulse pulse;
    std::string synthesis_domain = "freq";  // freq | time
    int freq_bins = 1024;
    double band_factor = 3.0;
    std::string amplitude_mode = "common";  // common | per_receiver | exact

    // noise
    double snr_db = std::numeric_limits<double>::infinity();
    std::uint64_t noise_seed = 0;

    // estimation
    bool estimation_enabled = true;
    double alpha = 0.0;  // 0 = auto: 0.001 noiseless, 0.075 with noise
    int smooth_window = 100;
    int theta_grid = 64;
    int phi_grid = 128;
    int omega_candidates = 41;
    double omega_span = 0.2;

    // correlation
    int imaging_band_stride = 16;
    int lag_decimation = 4;
    double lag_half_window_s = 0.0;
    double lag_taper = 0.0;

    // imaging
    double grid_half_extent = 0.5;
    double grid_spacing = 0.0078;
    int aperture_pulses = 0;  // 0 = all pulses; otherwise a centered slice
    RotationSource rotation_source = RotationSource::kTruth;
    bool image_single = true;
    bool image_rank1 = true;
    bool image_kirchhoff = true;
    int eigen_count = 10;

    // output
    bool write_pgm = true;

    void validate() const;
    double resolved_alpha() const;
};

/// Materialized scenario: receivers generated, domain objects assembled.
struct Scenario {
    ScenarioConfig config;
    ArrayLayout layout;
    Trajectory trajectory;
    Scene scene;

    SynthesisSpec synthesis_spec() const;
    MigrationSpec migration_spec(const RotationParams& rotation) const;
    EstimationOptions estimation_options() const;
    CorrelationOptions correlation_options() const;
    ImageGrid image_grid() const;
};

/// Parse and validate a config file. Errors name the offending line/field.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text, const std::string& origin);

/// Built-in presets: desk, desk_single, micro_time, paper_full.
ScenarioConfig preset_config(const std::string& name);
std::string preset_text(const std::string& name);
std::vector<std::string> preset_names();

/// Deterministic receiver placement and scenario assembly. `seed` perturbs
/// random receiver layouts and is folded into receiver_seed.
Scenario make_scenario(const ScenarioConfig& config, std::uint64_t seed);

}  // namespace isar
