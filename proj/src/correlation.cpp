#include "isar/correlation.hpp"

#include <cmath>

namespace isar {
namespace {

EchoSetTime apply_time_scale(const EchoSetTime& echoes, const ArrayLayout& layout,
                             const Trajectory& reference, bool invert) {
    EchoSetTime out = echoes;
    for (int r = 0; r < out.receiver_count(); ++r) {
        for (int i = 0; i < out.pulse_count(); ++i) {
            const Vec3 center = reference.position(out.slow_times(i));
            const double gamma = doppler_factor(center, layout, r, reference.velocity);
            const double f = invert ? 1.0 / gamma : gamma;
            out.time_scale(r, i) *= f;
            out.center_time(r, i) *= f;
        }
    }
    return out;
}

}  // namespace

VecXcd CorrelationSet::cross_spectrum(int r, int r_prime, int pulse) const {
    return spectra.at(r).row(pulse).transpose().array() *
           spectra.at(r_prime).row(pulse).transpose().array().conjugate();
}

EchoSetTime rescale_echoes(const EchoSetTime& echoes, const ArrayLayout& layout,
                           const Trajectory& reference) {
    return apply_time_scale(echoes, layout, reference, false);
}

EchoSetTime unscale_echoes(const EchoSetTime& echoes, const ArrayLayout& layout,
                           const Trajectory& reference) {
    return apply_time_scale(echoes, layout, reference, true);
}

VecXcd cross_correlate_freq(const EchoSetFreq& echoes, int r, int r_prime, int pulse) {
    const MatXcd& a = echoes.spectra.at(r);
    const MatXcd& b = echoes.spectra.at(r_prime);
    if (a.cols() != b.cols())
        throw Error("cross_correlate_freq: spectra live on different frequency grids");
    return a.row(pulse).transpose().array() * b.row(pulse).transpose().array().conjugate();
}

LagTrace autocorrelate_time(const EchoSetTime& echoes, int receiver, int pulse) {
    const auto& row = echoes.samples.at(receiver).row(pulse);
    const int n = static_cast<int>(row.size());
    const double dt = (echoes.fast_times(1) - echoes.fast_times(0)) *
                      echoes.time_scale(receiver, pulse);

    LagTrace out;
    out.lags = VecXd(2 * n - 1);
    out.values = VecXd::Zero(2 * n - 1);
    for (int l = -(n - 1); l <= n - 1; ++l) {
        double acc = 0.0;
        const int j0 = std::max(0, -l);
        const int j1 = std::min(n, n - l);
        for (int j = j0; j < j1; ++j) acc += row(j) * row(j + l);
        out.lags(l + n - 1) = l * dt;
        out.values(l + n - 1) = acc * dt;
    }
    return out;
}

VecXd autocorrelation_from_spectrum(const Eigen::Ref<const VecXcd>& spectrum, const VecXd& omega,
                                    const VecXd& lags) {
    return analytic_autocorrelation_from_spectrum(spectrum, omega, lags).real();
}

VecXcd analytic_autocorrelation_from_spectrum(const Eigen::Ref<const VecXcd>& spectrum,
                                              const VecXd& omega, const VecXd& lags) {
    const double dw = omega(1) - omega(0);
    const VecXd power = spectrum.cwiseAbs2();
    VecXcd out(lags.size());
    for (int l = 0; l < lags.size(); ++l) {
        const double tau = lags(l);
        const auto phase = (-omega.array() * tau);
        out(l) = Complex((dw / kPi) * (power.array() * phase.cos()).sum(),
                         (dw / kPi) * (power.array() * phase.sin()).sum());
    }
    return out;
}

PulseAutocorrelation::PulseAutocorrelation(const Pulse& pulse, int nodes) {
    const double b = pulse.envelope_rate();
    const double lo = std::max(0.0, pulse.omega_carrier() - 6.0 * b);
    const double hi = pulse.omega_carrier() + 6.0 * b;
    omega_ = VecXd(nodes);
    weight_ = VecXd(nodes);
    const double dw = (hi - lo) / (nodes - 1);
    for (int m = 0; m < nodes; ++m) {
        const double w = lo + m * dw;
        const double fh = pulse_spectrum(w, pulse);
        double trap = (m == 0 || m == nodes - 1) ? 0.5 : 1.0;
        omega_(m) = w;
        weight_(m) = trap * (dw / kPi) * w * w * w * w * fh * fh;
    }
}

double PulseAutocorrelation::operator()(double tau) const {
    return (weight_.array() * (omega_.array() * tau).cos()).sum();
}

namespace {

VecXd make_lag_grid(const Pulse& pulse, const CorrelationOptions& options) {
    const double dt = options.lag_decimation / pulse.resolved_sample_rate();
    double half = options.lag_half_window_s > 0.0 ? options.lag_half_window_s
                                                  : 0.5 * pulse.window_s;
    if (half <= 0.0) throw ConfigError("correlation lag window is not set");
    const int n_half = std::max(1, static_cast<int>(std::floor(half / dt)));
    VecXd lags(2 * n_half + 1);
    for (int l = -n_half; l <= n_half; ++l) lags(l + n_half) = l * dt;
    return lags;
}

VecXd tukey_weights(int n, double fraction) {
    VecXd w = VecXd::Ones(n);
    if (fraction <= 0.0 || n < 3) return w;
    const double a = std::min(fraction, 0.5);
    for (int m = 0; m < n; ++m) {
        const double u = static_cast<double>(m) / (n - 1);
        if (u < a) w(m) = 0.5 * (1.0 - std::cos(kPi * u / a));
        else if (u > 1.0 - a) w(m) = 0.5 * (1.0 - std::cos(kPi * (1.0 - u) / a));
    }
    return w;
}

}  // namespace

CorrelationSet correlate(const EchoSetFreq& echoes, const Pulse& pulse,
                         const Trajectory& reference, const CorrelationOptions& options) {
    CorrelationSet set;
    set.slow_times = echoes.slow_times;
    set.reference_position = reference.position0;
    set.reference_velocity = reference.velocity;
    set.lags = make_lag_grid(pulse, options);

    const int stride = std::max(1, options.imaging_band_stride);
    const int n_keep = (echoes.bin_count() + stride - 1) / stride;
    set.omega = VecXd(n_keep);
    for (int m = 0; m < n_keep; ++m) set.omega(m) = echoes.omega(m * stride);

    const int n_r = echoes.receiver_count();
    const int n_s = echoes.pulse_count();
    const VecXd taper = tukey_weights(echoes.bin_count(), options.lag_taper);
    const VecXd taper_sqrt = taper.cwiseSqrt();
    set.spectra.assign(n_r, MatXcd(n_s, n_keep));
    set.auto_corr.assign(n_r, MatXd(n_s, set.lags.size()));
    set.auto_envelope.assign(n_r, MatXd(n_s, set.lags.size()));
    for (int r = 0; r < n_r; ++r) {
        for (int m = 0; m < n_keep; ++m)
            set.spectra[r].col(m) = echoes.spectra[r].col(m * stride);
        for (int i = 0; i < n_s; ++i) {
            const VecXcd tapered =
                echoes.spectra[r].row(i).transpose().cwiseProduct(taper_sqrt.cast<Complex>());
            const VecXcd analytic =
                analytic_autocorrelation_from_spectrum(tapered, echoes.omega, set.lags);
            set.auto_corr[r].row(i) = analytic.real().transpose();
            set.auto_envelope[r].row(i) = analytic.cwiseAbs().transpose();
        }
    }
    return set;
}

EchoSetFreq echoes_to_spectra(const EchoSetTime& echoes, const ArrayLayout& layout,
                              const Trajectory& reference, const VecXd& omega) {
    // Rescale first unless the caller already did; raw sets carry scale 1.
    EchoSetTime scaled = echoes;
    if ((scaled.time_scale.array() == 1.0).all())
        scaled = rescale_echoes(echoes, layout, reference);

    const int n_r = scaled.receiver_count();
    const int n_s = scaled.pulse_count();
    const int n_t = scaled.sample_count();

    EchoSetFreq aligned;
    aligned.slow_times = scaled.slow_times;
    aligned.omega = omega;
    aligned.spectra.assign(n_r, MatXcd(n_s, omega.size()));
    for (int r = 0; r < n_r; ++r) {
        for (int i = 0; i < n_s; ++i) {
            const double s = scaled.slow_times(i);
            const double t_ref =
                travel_time(reference.position(s), layout, r, reference.velocity);
            const double scale = scaled.time_scale(r, i);
            const double shift = scaled.center_time(r, i) - t_ref;
            const double dt = (scaled.fast_times(1) - scaled.fast_times(0)) * scale;
            for (int m = 0; m < omega.size(); ++m) {
                Complex acc(0.0, 0.0);
                for (int j = 0; j < n_t; ++j) {
                    const double phase = omega(m) * (shift + scale * scaled.fast_times(j));
                    acc += scaled.samples[r](i, j) * std::polar(1.0, phase);
                }
                aligned.spectra[r](i, m) = acc * dt;
            }
        }
    }
    return aligned;
}

CorrelationSet correlate(const EchoSetTime& echoes, const ArrayLayout& layout,
                         const Pulse& pulse, const Trajectory& reference, const VecXd& omega,
                         const CorrelationOptions& options) {
    return correlate(echoes_to_spectra(echoes, layout, reference, omega), pulse, reference,
                     options);
}

}  // namespace isar
