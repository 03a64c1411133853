#include "isar/scenario.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace isar {
namespace {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct Parser {
    std::string origin;
    int line_no = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + msg);
    }

    double number(const std::string& v) const {
        if (v == "inf" || v == "off") return std::numeric_limits<double>::infinity();
        try {
            std::size_t pos = 0;
            const double x = std::stod(v, &pos);
            while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos]))) ++pos;
            if (pos != v.size()) fail("trailing characters after number: '" + v + "'");
            return x;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            fail("expected a number, got '" + v + "'");
        }
    }

    int integer(const std::string& v) const {
        const double x = number(v);
        if (x != std::floor(x)) fail("expected an integer, got '" + v + "'");
        return static_cast<int>(x);
    }

    bool boolean(const std::string& v) const {
        if (v == "true" || v == "1" || v == "on") return true;
        if (v == "false" || v == "0" || v == "off") return false;
        fail("expected a boolean, got '" + v + "'");
    }

    std::vector<double> numbers(const std::string& v, std::size_t n) const {
        std::istringstream in(v);
        std::vector<double> out;
        std::string tok;
        while (in >> tok) out.push_back(number(tok));
        if (out.size() != n)
            fail("expected " + std::to_string(n) + " numbers, got " + std::to_string(out.size()));
        return out;
    }

    Vec3 vec3(const std::string& v) const {
        const auto xs = numbers(v, 3);
        return Vec3(xs[0], xs[1], xs[2]);
    }
};

bool starts_with(const std::string& s, const std::string& prefix) {
    return s.rfind(prefix, 0) == 0;
}

}  // namespace

void ScenarioConfig::validate() const {
    rotation.validate();
    if (receiver_mode != "random" && receiver_mode != "grid" && receiver_mode != "explicit")
        throw ConfigError("geometry.receiver_mode must be random, grid or explicit");
    if (receiver_mode == "explicit") {
        if (receivers_explicit.size() < 2)
            throw ConfigError("geometry.receiver_mode=explicit needs >= 2 geometry.receiver.N lines");
    } else if (receiver_count < 2) {
        throw ConfigError("geometry.receiver_count must be >= 2");
    }
    if (!(receiver_area > 0.0)) throw ConfigError("geometry.receiver_area must be > 0");
    if (scatterers.size() != reflectivities.size())
        throw ConfigError("scene.scatterer lines are inconsistent");
    pulse.validate(synthesis_domain == "time");
    if (synthesis_domain != "freq" && synthesis_domain != "time")
        throw ConfigError("synthesis.domain must be freq or time");
    if (freq_bins < 2) throw ConfigError("synthesis.freq_bins must be >= 2");
    if (!(band_factor > 0.0)) throw ConfigError("synthesis.band_factor must be > 0");
    if (amplitude_mode != "common" && amplitude_mode != "per_receiver" && amplitude_mode != "exact")
        throw ConfigError("synthesis.amplitude must be common, per_receiver or exact");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("estimation.alpha must lie in [0, 1)");
    if (smooth_window < 2) throw ConfigError("estimation.smooth_window must be >= 2");
    if (theta_grid < 2 || phi_grid < 2) throw ConfigError("estimation scan grids must be >= 2");
    if (omega_candidates < 1) throw ConfigError("estimation.omega_candidates must be >= 1");
    if (!(omega_span >= 0.0 && omega_span < 1.0)) throw ConfigError("estimation.omega_span in [0,1)");
    if (imaging_band_stride < 1) throw ConfigError("correlation.band_stride must be >= 1");
    if (lag_decimation < 1) throw ConfigError("correlation.lag_decimation must be >= 1");
    if (!(grid_spacing > 0.0)) throw ConfigError("imaging.grid_spacing must be > 0");
    if (!(grid_half_extent >= 0.0)) throw ConfigError("imaging.grid_half_extent must be >= 0");
    if (aperture_pulses < 0 || aperture_pulses > pulse.num_pulses)
        throw ConfigError("imaging.aperture_pulses must lie in [0, pulse.count]");
    if (eigen_count < 1) throw ConfigError("imaging.eigen_count must be >= 1");
    if (lag_half_window_s < 0.0) throw ConfigError("correlation.lag_half_window_s must be >= 0");
    if (!(lag_taper >= 0.0 && lag_taper <= 0.5)) throw ConfigError("correlation.lag_taper must lie in [0, 0.5]");
}

double ScenarioConfig::resolved_alpha() const {
    if (alpha > 0.0) return alpha;
    return std::isinf(snr_db) ? 0.001 : 0.075;
}

SynthesisSpec Scenario::synthesis_spec() const {
    SynthesisSpec spec;
    spec.layout = &layout;
    spec.trajectory = &trajectory;
    spec.rotation = &config.rotation;
    spec.scene = &scene;
    spec.pulse = &config.pulse;
    spec.rotation_center_offset = config.rotation_center_offset;
    if (config.amplitude_mode == "per_receiver") spec.amplitude = AmplitudeMode::kPerReceiver;
    else if (config.amplitude_mode == "exact") spec.amplitude = AmplitudeMode::kExact;
    else spec.amplitude = AmplitudeMode::kCommon;
    return spec;
}

MigrationSpec Scenario::migration_spec(const RotationParams& rotation) const {
    MigrationSpec spec;
    spec.layout = &layout;
    spec.trajectory = &trajectory;
    spec.rotation = rotation;
    spec.rotation_center_offset = Vec3::Zero();
    return spec;
}

EstimationOptions Scenario::estimation_options() const {
    EstimationOptions opt;
    opt.alpha = config.resolved_alpha();
    opt.smooth_window = config.smooth_window;
    opt.theta_grid = config.theta_grid;
    opt.phi_grid = config.phi_grid;
    opt.omega_candidates = config.omega_candidates;
    opt.omega_span = config.omega_span;
    return opt;
}

CorrelationOptions Scenario::correlation_options() const {
    CorrelationOptions opt;
    opt.imaging_band_stride = config.imaging_band_stride;
    opt.lag_decimation = config.lag_decimation;
    opt.lag_half_window_s = config.lag_half_window_s;
    opt.lag_taper = config.lag_taper;
    return opt;
}

ImageGrid Scenario::image_grid() const {
    return ImageGrid::square(config.grid_half_extent, config.grid_spacing);
}

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin) {
    ScenarioConfig cfg;
    cfg.scatterers.clear();
    cfg.reflectivities.clear();

    Parser p{origin};
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++p.line_no;
        std::string line = raw.substr(0, raw.find('#'));
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) p.fail("expected 'key = value'");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) p.fail("empty key");
        if (value.empty()) p.fail("empty value for key '" + key + "'");

        if (key == "geometry.emitter") cfg.emitter = p.vec3(value);
        else if (key == "geometry.receiver_height") cfg.receiver_height = p.number(value);
        else if (key == "geometry.receiver_area") cfg.receiver_area = p.number(value);
        else if (key == "geometry.receiver_mode") cfg.receiver_mode = value;
        else if (key == "geometry.receiver_count") cfg.receiver_count = p.integer(value);
        else if (key == "geometry.receiver_seed") cfg.receiver_seed = static_cast<std::uint64_t>(p.number(value));
        else if (starts_with(key, "geometry.receiver.")) cfg.receivers_explicit.push_back(p.vec3(value));
        else if (key == "trajectory.position") cfg.target_position = p.vec3(value);
        else if (key == "trajectory.velocity") cfg.target_velocity = p.vec3(value);
        else if (key == "rotation.theta") cfg.rotation.theta_rot = p.number(value);
        else if (key == "rotation.phi") cfg.rotation.phi_rot = p.number(value);
        else if (key == "rotation.omega") cfg.rotation.omega_r = p.number(value);
        else if (key == "rotation.center_offset") cfg.rotation_center_offset = p.vec3(value);
        else if (starts_with(key, "scene.scatterer.")) {
            const auto xs = p.numbers(value, 3);
            cfg.scatterers.emplace_back(xs[0], xs[1]);
            cfg.reflectivities.push_back(xs[2]);
        }
        else if (key == "pulse.carrier_hz") cfg.pulse.carrier_hz = p.number(value);
        else if (key == "pulse.bandwidth_hz") cfg.pulse.bandwidth_hz = p.number(value);
        else if (key == "pulse.spacing_s") cfg.pulse.spacing_s = p.number(value);
        else if (key == "pulse.count") cfg.pulse.num_pulses = p.integer(value);
        else if (key == "pulse.sample_rate_hz") cfg.pulse.sample_rate_hz = p.number(value);
        else if (key == "pulse.window_s") cfg.pulse.window_s = p.number(value);
        else if (key == "synthesis.domain") cfg.synthesis_domain = value;
        else if (key == "synthesis.freq_bins") cfg.freq_bins = p.integer(value);
        else if (key == "synthesis.band_factor") cfg.band_factor = p.number(value);
        else if (key == "synthesis.amplitude") cfg.amplitude_mode = value;
        else if (key == "noise.snr_db") cfg.snr_db = p.number(value);
        else if (key == "noise.seed") cfg.noise_seed = static_cast<std::uint64_t>(p.number(value));
        else if (key == "estimation.enabled") cfg.estimation_enabled = p.boolean(value);
        else if (key == "estimation.alpha") cfg.alpha = p.number(value);
        else if (key == "estimation.smooth_window") cfg.smooth_window = p.integer(value);
        else if (key == "estimation.theta_grid") cfg.theta_grid = p.integer(value);
        else if (key == "estimation.phi_grid") cfg.phi_grid = p.integer(value);
        else if (key == "estimation.omega_candidates") cfg.omega_candidates = p.integer(value);
        else if (key == "estimation.omega_span") cfg.omega_span = p.number(value);
        else if (key == "correlation.band_stride") cfg.imaging_band_stride = p.integer(value);
        else if (key == "correlation.lag_decimation") cfg.lag_decimation = p.integer(value);
        else if (key == "correlation.lag_half_window_s") cfg.lag_half_window_s = p.number(value);
        else if (key == "correlation.lag_taper") cfg.lag_taper = p.number(value);
        else if (key == "imaging.grid_half_extent") cfg.grid_half_extent = p.number(value);
        else if (key == "imaging.grid_spacing") cfg.grid_spacing = p.number(value);
        else if (key == "imaging.aperture_pulses") cfg.aperture_pulses = p.integer(value);
        else if (key == "imaging.rotation_source") {
            if (value == "truth") cfg.rotation_source = RotationSource::kTruth;
            else if (value == "estimate") cfg.rotation_source = RotationSource::kEstimate;
            else if (value == "none") cfg.rotation_source = RotationSource::kNone;
            else p.fail("imaging.rotation_source must be truth, estimate or none");
        }
        else if (key == "imaging.single") cfg.image_single = p.boolean(value);
        else if (key == "imaging.rank1") cfg.image_rank1 = p.boolean(value);
        else if (key == "imaging.kirchhoff") cfg.image_kirchhoff = p.boolean(value);
        else if (key == "imaging.eigen_count") cfg.eigen_count = p.integer(value);
        else if (key == "output.write_pgm") cfg.write_pgm = p.boolean(value);
        else p.fail("unknown key '" + key + "'");
    }

    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

Scenario make_scenario(const ScenarioConfig& config, std::uint64_t seed) {
    config.validate();
    Scenario sc;
    sc.config = config;

    sc.layout.emitter = config.emitter;
    sc.layout.receiver_height = config.receiver_height;
    sc.layout.aperture_diameter = config.receiver_area;
    if (config.receiver_mode == "explicit") {
        sc.layout.receivers = config.receivers_explicit;
    } else if (config.receiver_mode == "grid") {
        const int side = static_cast<int>(std::round(std::sqrt(config.receiver_count)));
        if (side * side != config.receiver_count)
            throw ConfigError("geometry.receiver_mode=grid needs a square receiver_count");
        for (int iy = 0; iy < side; ++iy)
            for (int ix = 0; ix < side; ++ix)
                sc.layout.receivers.emplace_back(
                    ((ix + 0.5) / side - 0.5) * config.receiver_area,
                    ((iy + 0.5) / side - 0.5) * config.receiver_area, config.receiver_height);
    } else {
        std::mt19937_64 rng(mix_seed(config.receiver_seed, seed));
        auto uniform = [&] { return ((rng() >> 11) * 0x1.0p-53 - 0.5) * config.receiver_area; };
        for (int i = 0; i < config.receiver_count; ++i) {
            const double x = uniform();
            const double y = uniform();
            sc.layout.receivers.emplace_back(x, y, config.receiver_height);
        }
    }
    sc.layout.validate();

    sc.trajectory.position0 = config.target_position;
    sc.trajectory.velocity = config.target_velocity;

    for (std::size_t k = 0; k < config.scatterers.size(); ++k) {
        sc.scene.offsets.emplace_back(config.scatterers[k].x(), config.scatterers[k].y(), 0.0);
        sc.scene.reflectivity.push_back(config.reflectivities[k]);
    }
    sc.scene.validate();
    return sc;
}

}  // namespace isar
