#include "isar/scenario.hpp"

namespace isar {
namespace {

// Full-scale scenario: X-band carrier, 15 receivers over a 200 km aperture,
// LEO target at 500 km moving 7.6 km/s, six-scatterer cluster.
const char* const kPaperFull = R"(# full-scale scenario
geometry.emitter = -25e3 10e3 0
geometry.receiver_height = 15e3
geometry.receiver_area = 200e3
geometry.receiver_mode = random
geometry.receiver_count = 15
geometry.receiver_seed = 1

trajectory.position = 0 0 500e3
trajectory.velocity = 7600 0 0

rotation.theta = 2.356194490192345
rotation.phi = 0.7853981633974483
rotation.omega = 1.2566370614359172

scene.scatterer.0 = 0 0.15 1
scene.scatterer.1 = 0 -0.15 1
scene.scatterer.2 = 0.06 0.06 1
scene.scatterer.3 = 0.06 -0.06 1
scene.scatterer.4 = -0.06 0.06 1
scene.scatterer.5 = -0.06 -0.06 1

pulse.carrier_hz = 9.6e9
pulse.bandwidth_hz = 311e6
pulse.spacing_s = 0.015
pulse.count = 1500

synthesis.freq_bins = 1024
correlation.band_stride = 16
correlation.lag_half_window_s = 8e-9

imaging.grid_half_extent = 0.25
imaging.grid_spacing = 0.007807095260416667
)";

// Desk-scale run: carrier dropped to 2.4 GHz and the scene stretched by the
// same factor of 4 so every resolution ratio of the full-scale setup is kept,
// 7 receivers, 400 pulses (1.2 rotation periods). Runs in seconds.
const char* const kDesk = R"(# desk-scale multi-target scenario
geometry.emitter = -25e3 10e3 0
geometry.receiver_height = 15e3
geometry.receiver_area = 200e3
geometry.receiver_mode = random
geometry.receiver_count = 7
geometry.receiver_seed = 1

trajectory.position = 0 0 500e3
trajectory.velocity = 7600 0 0

rotation.theta = 2.356194490192345
rotation.phi = 0.7853981633974483
rotation.omega = 1.2566370614359172

scene.scatterer.0 = 0 0.6 1
scene.scatterer.1 = 0 -0.6 1
scene.scatterer.2 = 0.24 0.24 1
scene.scatterer.3 = 0.24 -0.24 1
scene.scatterer.4 = -0.24 0.24 1
scene.scatterer.5 = -0.24 -0.24 1

pulse.carrier_hz = 2.4e9
pulse.bandwidth_hz = 311e6
pulse.spacing_s = 0.015
pulse.count = 400

synthesis.freq_bins = 1024
correlation.band_stride = 16
correlation.lag_half_window_s = 16e-9

imaging.grid_half_extent = 1.0
imaging.grid_spacing = 0.06245676208333333
)";

// Single scatterer at desk scale; used for resolution and spectrum studies.
const char* const kDeskSingle = R"(# desk-scale single-target scenario
geometry.emitter = -25e3 10e3 0
geometry.receiver_height = 15e3
geometry.receiver_area = 200e3
geometry.receiver_mode = random
geometry.receiver_count = 7
geometry.receiver_seed = 1

trajectory.position = 0 0 500e3
trajectory.velocity = 7600 0 0

rotation.theta = 2.356194490192345
rotation.phi = 0.7853981633974483
rotation.omega = 1.2566370614359172

scene.scatterer.0 = 0.24 0.24 1

pulse.carrier_hz = 2.4e9
pulse.bandwidth_hz = 311e6
pulse.spacing_s = 0.015
pulse.count = 400

synthesis.freq_bins = 1024
correlation.band_stride = 16
correlation.lag_half_window_s = 8e-9

estimation.enabled = false

imaging.grid_half_extent = 0.5
imaging.grid_spacing = 0.031228381041666666
)";

// Sub-GHz carrier so time-domain synthesis stays cheap; exercised by the
// time/frequency consistency checks and the CLI smoke runs.
const char* const kMicroTime = R"(# micro time-domain scenario
geometry.emitter = -25e3 10e3 0
geometry.receiver_height = 15e3
geometry.receiver_area = 200e3
geometry.receiver_mode = random
geometry.receiver_count = 3
geometry.receiver_seed = 1

trajectory.position = 0 0 500e3
trajectory.velocity = 0 0 0

rotation.theta = 2.356194490192345
rotation.phi = 0.7853981633974483
rotation.omega = 1.2566370614359172

scene.scatterer.0 = 0 2 1
scene.scatterer.1 = 0 -2 0.8

pulse.carrier_hz = 0.6e9
pulse.bandwidth_hz = 0.15e9
pulse.spacing_s = 0.015
pulse.count = 3
pulse.window_s = 64e-9

synthesis.domain = time
synthesis.freq_bins = 129
correlation.band_stride = 1
correlation.lag_decimation = 1

estimation.enabled = false

imaging.grid_half_extent = 3.0
imaging.grid_spacing = 0.25
)";

}  // namespace

std::vector<std::string> preset_names() {
    return {"desk", "desk_single", "micro_time", "paper_full"};
}

std::string preset_text(const std::string& name) {
    if (name == "paper_full") return kPaperFull;
    if (name == "desk") return kDesk;
    if (name == "desk_single") return kDeskSingle;
    if (name == "micro_time") return kMicroTime;
    throw ConfigError("unknown preset '" + name + "'; available: desk, desk_single, micro_time, paper_full");
}

ScenarioConfig preset_config(const std::string& name) {
    return parse_config_text(preset_text(name), "preset:" + name);
}

}  // namespace isar
