#pragma once

#include "isar/waveform.hpp"

namespace isar {

/// Lag-domain correlation samples for one (receiver, pulse) cell.
struct LagTrace {
    VecXd lags;
    VecXd values;
};

struct CorrelationOptions {
    /// Keep every n-th bin of the synthesis band for the imaging spectra.
    int imaging_band_stride = 1;
    /// Lag grid spacing = lag_decimation / sample_rate.
    int lag_decimation = 4;
    /// Half extent of the lag grid [s]; 0 derives it from the pulse window.
    double lag_half_window_s = 0.0;
    /// Optional raised-cosine roll-off fraction per band edge for the lag
    /// synthesis. With the default band half-width (3x bandwidth) the plain
    /// truncation already rings below 1e-4 of the peak, so this stays off;
    /// a taper kink inside the strong part of the spectrum rings worse.
    double lag_taper = 0.0;
};

/// Doppler-rescaled, window-aligned cross-correlation data.
///
/// The frequency-domain cross-correlations are rank one per (pulse, bin) by
/// construction, so the set stores their factor: the aligned spectra
/// u_hat_R(s_i, w_m). Pair products are formed on demand. Per-receiver
/// autocorrelations are kept in the lag domain for the rotation estimator.
struct CorrelationSet {
    std::vector<MatXcd> spectra;   // [receiver](pulse, bin), aligned and rescaled
    VecXd slow_times;
    VecXd omega;
    std::vector<MatXd> auto_corr;      // [receiver](pulse, lag), real C_R
    std::vector<MatXd> auto_envelope;  // |analytic C_R|: one-sided-band magnitude
    VecXd lags;
    Vec3 reference_position = Vec3::Zero();
    Vec3 reference_velocity = Vec3::Zero();

    int receiver_count() const { return static_cast<int>(spectra.size()); }
    int pulse_count() const { return static_cast<int>(slow_times.size()); }
    int bin_count() const { return static_cast<int>(omega.size()); }
    int lag_count() const { return static_cast<int>(lags.size()); }

    /// C_hat_{RR'}(s, w) = u_hat_R(s, w) * conj(u_hat_R'(s, w)).
    VecXcd cross_spectrum(int r, int r_prime, int pulse) const;
};

/// Divide each receiver's fast-time axis by its reference Doppler factor
/// gamma_R(x0 + s*v0, x_E, v0). Values are untouched; the axis metadata is
/// relabeled, so the operation is exactly invertible.
EchoSetTime rescale_echoes(const EchoSetTime& echoes, const ArrayLayout& layout,
                           const Trajectory& reference);
/// Undo rescale_echoes.
EchoSetTime unscale_echoes(const EchoSetTime& echoes, const ArrayLayout& layout,
                           const Trajectory& reference);

/// Elementwise spectral product of one receiver pair at one pulse.
/// Both spectra must share the frequency grid.
VecXcd cross_correlate_freq(const EchoSetFreq& echoes, int r, int r_prime, int pulse);

/// Discrete linear autocorrelation of one (receiver, pulse) cell over the
/// fast-time window (zero padded, peak at lag 0).
LagTrace autocorrelate_time(const EchoSetTime& echoes, int receiver, int pulse);

/// Lag-domain autocorrelation synthesized from a band-limited autospectrum:
/// C(tau) = (dw/pi) * sum_m |u_hat_m|^2 cos(w_m tau).
VecXd autocorrelation_from_spectrum(const Eigen::Ref<const VecXcd>& spectrum, const VecXd& omega,
                                    const VecXd& lags);

/// Same sum without taking the real part; its magnitude is the carrier-free
/// lag envelope of the (one-sided band) autocorrelation.
VecXcd analytic_autocorrelation_from_spectrum(const Eigen::Ref<const VecXcd>& spectrum,
                                              const VecXd& omega, const VecXd& lags);

/// Pulse autocorrelation kernel G(tau) = int f''(t) f''(t+tau) dt, evaluated
/// by quadrature of its spectral form.
class PulseAutocorrelation {
public:
    explicit PulseAutocorrelation(const Pulse& pulse, int nodes = 4096);
    double operator()(double tau) const;

private:
    VecXd omega_;
    VecXd weight_;  // (dw/pi) * w^4 f_hat(w)^2
};

/// Align time-domain echoes to the moving window center (exact frequency-
/// domain phase ramps) and transform onto `omega`; rescales first when the
/// set is still on the raw clock.
EchoSetFreq echoes_to_spectra(const EchoSetTime& echoes, const ArrayLayout& layout,
                              const Trajectory& reference, const VecXd& omega);

/// Build the correlation data structure from frequency-domain echoes
/// (already aligned by synthesis). The full band feeds the lag-domain
/// autocorrelations; a strided copy becomes the imaging spectra.
CorrelationSet correlate(const EchoSetFreq& echoes, const Pulse& pulse,
                         const Trajectory& reference, const CorrelationOptions& options);

/// Build the correlation data structure from time-domain echoes: rescale if
/// needed, align to the moving window center, transform onto `omega`.
CorrelationSet correlate(const EchoSetTime& echoes, const ArrayLayout& layout,
                         const Pulse& pulse, const Trajectory& reference, const VecXd& omega,
                         const CorrelationOptions& options);

}  // namespace isar
