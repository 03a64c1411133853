#include "isar/waveform.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace isar {
namespace {

Vec3 receiver_centroid(const ArrayLayout& layout) {
    Vec3 c = Vec3::Zero();
    for (const Vec3& r : layout.receivers) c += r;
    return c / static_cast<double>(layout.receivers.size());
}

double amplitude_range(double s, const SynthesisSpec& spec, int receiver_index) {
    const Vec3 center = spec.trajectory->position(s);
    switch (spec.amplitude) {
        case AmplitudeMode::kCommon:
            return (center - receiver_centroid(*spec.layout)).norm();
        default:
            return (center - spec.layout->receivers.at(receiver_index)).norm();
    }
}

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, int receiver, int pulse) {
    std::uint64_t s = seed;
    (void)splitmix64(s);
    s ^= 0x517cc1b727220a95ULL * (static_cast<std::uint64_t>(receiver) + 1);
    (void)splitmix64(s);
    s ^= 0x2545f4914f6cdd1dULL * (static_cast<std::uint64_t>(pulse) + 1);
    return splitmix64(s);
}

// Standard-normal generator on mt19937_64; Box-Muller keeps the sequence
// independent of the standard library's distribution internals.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = (rng_() >> 11) * 0x1.0p-53 + 0x1.0p-54;  // (0, 1)
        const double u2 = (rng_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * kPi * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * kPi * u2);
    }

private:
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace

void Pulse::validate(bool time_domain) const {
    if (!(carrier_hz > 0.0)) throw ConfigError("pulse.carrier_hz must be > 0");
    if (!(bandwidth_hz > 0.0)) throw ConfigError("pulse.bandwidth_hz must be > 0");
    if (num_pulses < 1) throw ConfigError("pulse.count must be >= 1");
    if (!(spacing_s > 0.0)) throw ConfigError("pulse.spacing_s must be > 0");
    if (time_domain) {
        if (!(window_s > 0.0)) throw ConfigError("pulse.window_s must be > 0 for time synthesis");
        const double nyquist = 2.0 * (carrier_hz + 3.0 * bandwidth_hz);
        if (resolved_sample_rate() < nyquist)
            throw ConfigError("pulse.sample_rate_hz below 2*(carrier + 3*bandwidth)");
    }
}

double Pulse::envelope_rate() const {
    return 2.0 * kPi * bandwidth_hz / std::sqrt(std::log(2.0));
}

double Pulse::resolved_sample_rate() const {
    if (sample_rate_hz > 0.0) return sample_rate_hz;
    // Default rate keeps spectral aliasing below 1e-12 in-band, well past Nyquist.
    return 2.0 * (carrier_hz + 6.0 * bandwidth_hz);
}

VecXd Pulse::slow_times() const {
    VecXd s(num_pulses);
    const double mid = 0.5 * (num_pulses - 1);
    for (int i = 0; i < num_pulses; ++i) s(i) = (i - mid) * spacing_s;
    return s;
}

double pulse_value(double t, const Pulse& p) {
    const double b = p.envelope_rate();
    return std::cos(p.omega_carrier() * t) * std::exp(-0.5 * b * b * t * t);
}

double pulse_second_derivative(double t, const Pulse& p) {
    const double b2 = p.envelope_rate() * p.envelope_rate();
    const double wc = p.omega_carrier();
    const double env = std::exp(-0.5 * b2 * t * t);
    return env * ((b2 * b2 * t * t - wc * wc - b2) * std::cos(wc * t) +
                  2.0 * wc * b2 * t * std::sin(wc * t));
}

double pulse_spectrum(double omega, const Pulse& p) {
    const double b = p.envelope_rate();
    const double wc = p.omega_carrier();
    const double a = std::sqrt(2.0 * kPi) / (2.0 * b);
    const double dm = (omega - wc) / b;
    const double dp = (omega + wc) / b;
    return a * (std::exp(-0.5 * dm * dm) + std::exp(-0.5 * dp * dp));
}

VecXd frequency_grid(const Pulse& p, int bins, double band_halfwidth_factor) {
    if (bins < 2) throw ConfigError("frequency grid needs at least 2 bins");
    const double half = band_halfwidth_factor * 2.0 * kPi * p.bandwidth_hz;
    const double lo = p.omega_carrier() - half;
    const double hi = p.omega_carrier() + half;
    if (lo <= 0.0) throw ConfigError("frequency grid extends below DC; reduce band factor");
    VecXd omega(bins);
    for (int m = 0; m < bins; ++m)
        omega(m) = lo + (hi - lo) * static_cast<double>(m) / (bins - 1);
    return omega;
}

double amplitude_xi(double s, double omega, const SynthesisSpec& spec, int receiver_index) {
    const double range = amplitude_range(s, spec, receiver_index);
    const double denom = 4.0 * kPi * range;
    return omega * omega * pulse_spectrum(omega, *spec.pulse) / (denom * denom);
}

Complex sensing_entry(double s, double omega, const SynthesisSpec& spec, int receiver_index,
                      const Vec3& grid_point) {
    const double dt = reduced_travel_time(s, *spec.trajectory, *spec.rotation,
                                          grid_point + spec.rotation_center_offset,
                                          *spec.layout, receiver_index,
                                          spec.trajectory->velocity);
    return std::polar(1.0, omega * dt);
}

EchoSetFreq synthesize_echo_freq(const SynthesisSpec& spec, const VecXd& omega) {
    spec.scene->validate();
    const int n_r = spec.layout->receiver_count();
    const int n_s = spec.pulse->num_pulses;
    const int n_w = static_cast<int>(omega.size());

    EchoSetFreq out;
    out.slow_times = spec.pulse->slow_times();
    out.omega = omega;
    out.spectra.assign(n_r, MatXcd::Zero(n_s, n_w));

    const int n_t = spec.scene->size();
    for (int r = 0; r < n_r; ++r) {
        for (int i = 0; i < n_s; ++i) {
            const double s = out.slow_times(i);
            VecXcd row = VecXcd::Zero(n_w);
            for (int k = 0; k < n_t; ++k) {
                const double dt = reduced_travel_time(
                    s, *spec.trajectory, *spec.rotation,
                    spec.scene->offsets[k] + spec.rotation_center_offset, *spec.layout, r,
                    spec.trajectory->velocity);
                row.array() += spec.scene->reflectivity[k] *
                               (Complex(0.0, dt) * omega.array().cast<Complex>()).exp();
            }
            for (int m = 0; m < n_w; ++m)
                row(m) *= amplitude_xi(s, omega(m), spec, r);
            out.spectra[r].row(i) = row.transpose();
        }
    }
    return out;
}

EchoSetTime synthesize_echo_time(const SynthesisSpec& spec) {
    spec.scene->validate();
    spec.pulse->validate(true);
    const int n_r = spec.layout->receiver_count();
    const int n_s = spec.pulse->num_pulses;
    const double fs = spec.pulse->resolved_sample_rate();
    const int n_half = static_cast<int>(std::floor(0.5 * spec.pulse->window_s * fs));
    const int n_t = 2 * n_half + 1;

    EchoSetTime out;
    out.slow_times = spec.pulse->slow_times();
    out.fast_times = VecXd(n_t);
    for (int j = 0; j < n_t; ++j) out.fast_times(j) = (j - n_half) / fs;
    out.time_scale = MatXd::Ones(n_r, n_s);
    out.center_time = MatXd::Zero(n_r, n_s);
    out.samples.assign(n_r, MatXd::Zero(n_s, n_t));

    const Vec3 v0 = spec.trajectory->velocity;
    for (int r = 0; r < n_r; ++r) {
        for (int i = 0; i < n_s; ++i) {
            const double s = out.slow_times(i);
            const Vec3 center = spec.trajectory->position(s);
            const double gamma_ref = doppler_factor(center, *spec.layout, r, v0);
            const double t_ref = travel_time(center, *spec.layout, r, v0);
            out.center_time(r, i) = t_ref / gamma_ref;

            for (int k = 0; k < spec.scene->size(); ++k) {
                const Vec3 pos = spec.trajectory->position(s) + spec.rotation_center_offset +
                                 rotation_matrix(s, *spec.rotation) * spec.scene->offsets[k];
                const double gamma_k = doppler_factor(pos, *spec.layout, r, v0);
                const double t_k = travel_time(pos, *spec.layout, r, v0);
                if (std::abs(t_k - t_ref) > 0.5 * spec.pulse->window_s)
                    throw ConfigError("fast-time window too small for scatterer delay spread");
                double range = 0.0;
                if (spec.amplitude == AmplitudeMode::kExact)
                    range = (pos - spec.layout->receivers[r]).norm();
                else
                    range = amplitude_range(s, spec, r);
                const double amp = -spec.scene->reflectivity[k] /
                                   std::pow(4.0 * kPi * range, 2);
                for (int j = 0; j < n_t; ++j) {
                    const double t_abs = out.center_time(r, i) + out.fast_times(j);
                    out.samples[r](i, j) +=
                        amp * pulse_second_derivative(gamma_k * t_abs - t_k, *spec.pulse);
                }
            }
        }
    }
    return out;
}

EchoSetFreq add_noise(const EchoSetFreq& echoes, double snr_db, std::uint64_t seed) {
    if (std::isinf(snr_db)) return echoes;
    double power = 0.0;
    std::size_t count = 0;
    for (const MatXcd& m : echoes.spectra) {
        power += m.squaredNorm();
        count += static_cast<std::size_t>(m.size());
    }
    if (power <= 0.0) throw StageError("noise", "cannot set an SNR on an all-zero echo set");
    const double sigma2 = (power / count) * std::pow(10.0, -snr_db / 10.0);
    const double sigma_part = std::sqrt(0.5 * sigma2);

    EchoSetFreq out = echoes;
    for (int r = 0; r < out.receiver_count(); ++r) {
        for (int i = 0; i < out.pulse_count(); ++i) {
            GaussianStream g(substream_seed(seed, r, i));
            for (int m = 0; m < out.bin_count(); ++m) {
                const double re = g.next(), im = g.next();
                out.spectra[r](i, m) += Complex(sigma_part * re, sigma_part * im);
            }
        }
    }
    return out;
}

EchoSetTime add_noise(const EchoSetTime& echoes, double snr_db, std::uint64_t seed) {
    if (std::isinf(snr_db)) return echoes;
    double power = 0.0;
    std::size_t count = 0;
    for (const MatXd& m : echoes.samples) {
        power += m.squaredNorm();
        count += static_cast<std::size_t>(m.size());
    }
    if (power <= 0.0) throw StageError("noise", "cannot set an SNR on an all-zero echo set");
    const double sigma = std::sqrt((power / count) * std::pow(10.0, -snr_db / 10.0));

    EchoSetTime out = echoes;
    for (int r = 0; r < out.receiver_count(); ++r) {
        for (int i = 0; i < out.pulse_count(); ++i) {
            GaussianStream g(substream_seed(seed, r, i));
            for (int j = 0; j < out.sample_count(); ++j)
                out.samples[r](i, j) += sigma * g.next();
        }
    }
    return out;
}

}  // namespace isar
