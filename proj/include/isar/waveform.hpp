#pragma once

#include <cstdint>
#include <vector>

#include "isar/geometry.hpp"

namespace isar {

/// Modulated Gaussian pulse f(t) = cos(2*pi*carrier*t) * exp(-b^2 t^2 / 2).
///
/// The decay constant b is derived from the bandwidth in Hz so that the
/// two-sided power spectrum is 3 dB down at carrier +- bandwidth:
/// b = 2*pi*bandwidth / sqrt(ln 2).
struct Pulse {
    double carrier_hz = 0.0;
    double bandwidth_hz = 0.0;
    double spacing_s = 0.0;      // slow-time interval between pulses
    int num_pulses = 1;
    double sample_rate_hz = 0.0; // fast-time rate; 0 = auto 2*(carrier + 6*bandwidth)
    double window_s = 0.0;       // fast-time window length around the window center

    void validate(bool time_domain) const;
    double omega_carrier() const { return 2.0 * kPi * carrier_hz; }
    double envelope_rate() const;  // b [rad/s]
    double resolved_sample_rate() const;
    double wavelength() const { return kSpeedOfLight / carrier_hz; }
    /// Centered slow-time grid s_i, i = 0..num_pulses-1, spanning ~[-S/2, S/2].
    VecXd slow_times() const;
};

double pulse_value(double t, const Pulse& p);
/// Closed-form second derivative f''(t).
double pulse_second_derivative(double t, const Pulse& p);
/// Continuous spectrum f_hat(w) = int f(t) e^{iwt} dt (real, both Gaussian terms).
double pulse_spectrum(double omega, const Pulse& p);

/// Uniform frequency grid over [w_o - c*B, w_o + c*B] (rad/s).
VecXd frequency_grid(const Pulse& p, int bins, double band_halfwidth_factor);

enum class AmplitudeMode {
    kCommon,       // one range for all receivers (array center to window center)
    kPerReceiver,  // window-center range per receiver
    kExact         // per-scatterer range per receiver (time-domain synthesis only)
};

/// Everything echo synthesis needs beyond the pulse itself.
struct SynthesisSpec {
    const ArrayLayout* layout = nullptr;
    const Trajectory* trajectory = nullptr;   // window center / reference x0, v0
    const RotationParams* rotation = nullptr;
    const Scene* scene = nullptr;
    const Pulse* pulse = nullptr;
    Vec3 rotation_center_offset = Vec3::Zero();
    AmplitudeMode amplitude = AmplitudeMode::kCommon;
};

/// Amplitude factor xi(s, w) = w^2 f_hat(w) / (4*pi*range)^2.
double amplitude_xi(double s, double omega, const SynthesisSpec& spec, int receiver_index);

/// Frequency-domain echoes u_hat_R(s_i, w_m), aligned to the moving window
/// center (phases carry reduced travel times only).
struct EchoSetFreq {
    std::vector<MatXcd> spectra;  // [receiver](pulse, bin)
    VecXd slow_times;
    VecXd omega;

    int receiver_count() const { return static_cast<int>(spectra.size()); }
    int pulse_count() const { return static_cast<int>(slow_times.size()); }
    int bin_count() const { return static_cast<int>(omega.size()); }
};

/// Time-domain echoes on a shared window-local fast-time grid.
///
/// Sample (r, i, j) holds the signal value at absolute fast time
///   center_time(r, i) + time_scale(r, i) * fast_times(j)
/// on that channel's clock. Raw sets have time_scale = 1 and centers at
/// t_ref/gamma_ref; Doppler rescaling relabels the axis (center and scale
/// multiplied by gamma_ref) without touching sample values.
struct EchoSetTime {
    std::vector<MatXd> samples;  // [receiver](pulse, fast bin)
    VecXd slow_times;
    VecXd fast_times;
    MatXd time_scale;            // (receiver, pulse)
    MatXd center_time;           // (receiver, pulse)

    int receiver_count() const { return static_cast<int>(samples.size()); }
    int pulse_count() const { return static_cast<int>(slow_times.size()); }
    int sample_count() const { return static_cast<int>(fast_times.size()); }
};

/// Unit-modulus sensing entry A_{R,k}(s, w) = exp(i*w*(t_R^k(s) - t_R(s))).
Complex sensing_entry(double s, double omega, const SynthesisSpec& spec, int receiver_index,
                      const Vec3& grid_point);

/// Frequency-domain synthesis per the sensing model: xi(s,w) * sum_k A_{R,k} rho_k.
EchoSetFreq synthesize_echo_freq(const SynthesisSpec& spec, const VecXd& omega);

/// Raw time-domain synthesis of the scattered field (Doppler-scaled clock).
EchoSetTime synthesize_echo_time(const SynthesisSpec& spec);

/// Additive white Gaussian noise at the requested per-sample SNR (dB) over the
/// stored samples. Infinite SNR returns the input unchanged. Deterministic in
/// (seed, receiver, pulse) so parallel synthesis cannot change the draw.
EchoSetFreq add_noise(const EchoSetFreq& echoes, double snr_db, std::uint64_t seed);
EchoSetTime add_noise(const EchoSetTime& echoes, double snr_db, std::uint64_t seed);

}  // namespace isar
