#include "isar/rotation_estimation.hpp"

#include <algorithm>
#include <cmath>

#include "isar/nelder_mead.hpp"

namespace isar {
namespace {

// arctan(g) evaluated through atan2 and folded into (-pi/2, pi/2]; equivalent
// to atan(num/den) modulo pi and finite across den = 0.
double arctan_g(double theta, double phi, const Vec3& d) {
    const double num = -d.x() * std::sin(phi) + d.y() * std::cos(phi);
    const double den = d.x() * std::cos(theta) * std::cos(phi) +
                       d.y() * std::cos(theta) * std::sin(phi) + d.z() * std::sin(theta);
    return wrap_half_pi(std::atan2(num, den));
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

SupportTrace support_trace(const CorrelationSet& correlations, int receiver, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("support threshold must lie in (0,1)");
    // The carrier-free envelope gives a single outer threshold crossing per
    // side, which linear interpolation then locates to sub-lag accuracy.
    const MatXd& env = correlations.auto_envelope.at(receiver);
    const int n_s = static_cast<int>(env.rows());
    const int n_l = static_cast<int>(env.cols());

    SupportTrace trace;
    trace.receiver = receiver;
    trace.slow_times = correlations.slow_times;
    trace.support = VecXd::Zero(n_s);
    for (int i = 0; i < n_s; ++i) {
        const double peak = env.row(i).maxCoeff();
        if (peak <= 0.0)
            throw StageError("rotation_estimation", "autocorrelation is zero at a pulse");
        const double threshold = alpha * peak;
        double max_lag = 0.0;
        for (int side = 0; side < 2; ++side) {
            // walk inward from the window edge to the first exceedance
            const int step = side == 0 ? -1 : 1;
            const int edge = side == 0 ? n_l - 1 : 0;
            int k = edge;
            while (k >= 0 && k < n_l && env(i, k) < threshold) k += step;
            if (k < 0 || k >= n_l) continue;
            double lag = std::abs(correlations.lags(k));
            if (k != edge) {
                const int outward = k - step;
                const double frac =
                    (env(i, k) - threshold) / std::max(env(i, k) - env(i, outward), 1e-300);
                lag += frac * std::abs(correlations.lags(outward) - correlations.lags(k));
            }
            max_lag = std::max(max_lag, lag);
        }
        trace.support(i) = 2.0 * max_lag;
    }
    return trace;
}

std::vector<double> smooth_and_find_peaks(SupportTrace& trace, int window) {
    const int n = static_cast<int>(trace.support.size());
    if (n <= window) throw StageError("rotation_estimation", "trace shorter than smoothing window");

    const double sigma = window / 6.0;
    const int half = window / 2;
    trace.smoothed = VecXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0, norm = 0.0;
        for (int j = std::max(0, i - half); j <= std::min(n - 1, i + half); ++j) {
            const double w = std::exp(-0.5 * std::pow((j - i) / sigma, 2));
            acc += w * trace.support(j);
            norm += w;
        }
        trace.smoothed(i) = acc / norm;
    }

    trace.peak_times.clear();
    const int sep = std::max(1, half);
    const double ds = trace.slow_times(1) - trace.slow_times(0);
    for (int i = sep; i < n - sep; ++i) {
        bool is_peak = true;
        for (int j = std::max(0, i - sep); j <= std::min(n - 1, i + sep) && is_peak; ++j) {
            if (j != i && trace.smoothed(j) >= trace.smoothed(i)) is_peak = false;
        }
        if (!is_peak) continue;
        // The smoothed argmax only brackets the peak (asymmetric background
        // shifts it); refine by a least-squares parabola on the raw trace,
        // restricted to the top of the bump where the dominant scatterer
        // pair sets the support alone.
        const int fit_half = std::max(2, half / 2);
        const int lo = std::max(0, i - fit_half);
        const int hi = std::min(n - 1, i + fit_half);
        double top = trace.support(i);
        for (int j = lo; j <= hi; ++j) top = std::max(top, trace.support(j));
        double bottom = top;
        for (int j = lo; j <= hi; ++j) bottom = std::min(bottom, trace.support(j));
        const double floor_level = top - 0.35 * (top - bottom);
        double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
        int used = 0;
        for (int j = lo; j <= hi; ++j) {
            const double y = trace.support(j);
            if (y < floor_level) continue;
            const double u = static_cast<double>(j - i);
            s0 += 1.0; s1 += u; s2 += u * u; s3 += u * u * u; s4 += u * u * u * u;
            t0 += y; t1 += u * y; t2 += u * u * y;
            ++used;
        }
        double offset = 0.0;
        if (used >= 5) {
            Eigen::Matrix3d m;
            m << s0, s1, s2, s1, s2, s3, s2, s3, s4;
            const Vec3 coef = m.ldlt().solve(Vec3(t0, t1, t2));
            if (coef(2) < 0.0) offset = std::clamp(-0.5 * coef(1) / coef(2),
                                                   static_cast<double>(lo - i),
                                                   static_cast<double>(hi - i));
        }
        trace.peak_times.push_back(trace.slow_times(i) + offset * ds);
    }
    return trace.peak_times;
}

Vec3 direction_vector(double s, const ArrayLayout& layout, int receiver,
                      const Trajectory& trajectory) {
    const Vec3 x = trajectory.position(s);
    const Vec3 de = x - layout.emitter;
    const Vec3 dr = x - layout.receivers.at(receiver);
    const double ne = de.norm(), nr = dr.norm();
    if (ne == 0.0 || nr == 0.0)
        throw GeometryError("window center coincides with emitter or receiver");
    const double gamma = doppler_factor(x, layout, receiver, trajectory.velocity);
    return de / ne + (dr / nr) * gamma;
}

double g_ratio(double theta, double phi, const Vec3& d) {
    const double num = -d.x() * std::sin(phi) + d.y() * std::cos(phi);
    const double den = d.x() * std::cos(theta) * std::cos(phi) +
                       d.y() * std::cos(theta) * std::sin(phi) + d.z() * std::sin(theta);
    if (std::abs(den) < 1e-12 * d.norm())
        throw GeometryError("degenerate direction: axis projection denominator vanishes");
    return num / den;
}

double rotation_loss(double theta, double phi, double omega,
                     const std::vector<PeakSample>& data) {
    if (data.size() < 2)
        throw StageError("rotation_estimation", "need at least two peak samples");
    double loss = 0.0;
    double prev = arctan_g(theta, phi, data[0].direction);
    for (std::size_t i = 1; i < data.size(); ++i) {
        const double cur = arctan_g(theta, phi, data[i].direction);
        const double residual =
            wrap_half_pi(cur - prev - omega * (data[i].s_star - data[i - 1].s_star));
        loss += residual * residual;
        prev = cur;
    }
    return loss;
}

MatXd loss_surface(const std::vector<PeakSample>& data, int theta_grid, int phi_grid,
                   double omega) {
    MatXd surface(theta_grid, phi_grid);
    for (int a = 0; a < theta_grid; ++a) {
        const double theta = kPi * (a + 0.5) / theta_grid;
        for (int b = 0; b < phi_grid; ++b) {
            const double phi = 2.0 * kPi * b / phi_grid;
            surface(a, b) = rotation_loss(theta, phi, omega, data);
        }
    }
    return surface;
}

RotationEstimate estimate_rotation(const CorrelationSet& correlations,
                                   const ArrayLayout& layout, const Trajectory& trajectory,
                                   const EstimationOptions& options) {
    RotationEstimate est;

    std::vector<double> spacings;
    for (int r = 0; r < correlations.receiver_count(); ++r) {
        SupportTrace trace = support_trace(correlations, r, options.alpha);
        smooth_and_find_peaks(trace, options.smooth_window);
        for (std::size_t i = 0; i + 1 < trace.peak_times.size(); ++i)
            spacings.push_back(trace.peak_times[i + 1] - trace.peak_times[i]);
        for (double s_star : trace.peak_times) {
            est.data.push_back(
                {s_star, direction_vector(s_star, layout, r, trajectory), r});
        }
        est.traces.push_back(std::move(trace));
    }

    if (est.data.size() < 2)
        throw StageError("rotation_estimation",
                         "fewer than two support peaks detected; no rotation observable");
    std::sort(est.data.begin(), est.data.end(),
              [](const PeakSample& a, const PeakSample& b) { return a.s_star < b.s_star; });

    if (spacings.empty())
        throw StageError("rotation_estimation",
                         "no receiver shows two support peaks; angular rate prior unavailable");
    // |axis projection| has period pi/omega: two support maxima per revolution.
    const double omega_prior = kPi / median(spacings);

    double best_loss = std::numeric_limits<double>::infinity();
    double best_theta = 0.0, best_phi = 0.0, best_omega = omega_prior;
    std::vector<double> losses;
    losses.reserve(static_cast<std::size_t>(options.theta_grid) * options.phi_grid);
    for (int c = 0; c < options.omega_candidates; ++c) {
        const double frac = options.omega_candidates == 1
                                ? 0.0
                                : -options.omega_span +
                                      2.0 * options.omega_span * c / (options.omega_candidates - 1);
        const double omega = omega_prior * (1.0 + frac);
        for (int a = 0; a < options.theta_grid; ++a) {
            const double theta = kPi * (a + 0.5) / options.theta_grid;
            for (int b = 0; b < options.phi_grid; ++b) {
                const double phi = 2.0 * kPi * b / options.phi_grid;
                const double loss = rotation_loss(theta, phi, omega, est.data);
                losses.push_back(loss);
                if (loss < best_loss) {
                    best_loss = loss;
                    best_theta = theta;
                    best_phi = phi;
                    best_omega = omega;
                }
            }
        }
    }

    std::nth_element(losses.begin(), losses.begin() + losses.size() / 2, losses.end());
    const double median_loss = losses[losses.size() / 2];
    est.flat_loss_warning = median_loss > 0.0 && (median_loss - best_loss) < 0.05 * median_loss;

    VecXd start(3), step(3);
    start << best_theta, best_phi, best_omega;
    step << kPi / options.theta_grid, 2.0 * kPi / options.phi_grid, 0.02 * omega_prior;
    auto objective = [&](const VecXd& x) {
        return rotation_loss(x(0), x(1), std::abs(x(2)), est.data);
    };
    const NelderMeadResult refined = nelder_mead(objective, start, step, options.simplex_tol, 2000);

    // Fold the refined axis back into theta in [0, pi], phi in [0, 2*pi).
    RotationParams folded{refined.x(0), refined.x(1), std::abs(refined.x(2))};
    const Vec3 axis = rotation_frame(wrap_two_pi(folded.phi_rot), folded.theta_rot) * Vec3::UnitZ();
    est.theta_hat = std::acos(std::clamp(axis.z(), -1.0, 1.0));
    est.phi_hat = std::sin(est.theta_hat) > 1e-12 ? wrap_two_pi(std::atan2(-axis.y(), -axis.x()))
                                                  : 0.0;
    est.omega_hat = folded.omega_r;
    est.loss_value = rotation_loss(est.theta_hat, est.phi_hat, est.omega_hat, est.data);
    return est;
}

}  // namespace isar
