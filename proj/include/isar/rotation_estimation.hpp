#pragma once

#include <vector>

#include "isar/correlation.hpp"

namespace isar {

/// Per-receiver autocorrelation support trace over slow time, with the
/// smoothed version and the detected support maxima.
struct SupportTrace {
    int receiver = 0;
    VecXd slow_times;
    VecXd support;            // tau_supp(s_i) [s]
    VecXd smoothed;
    std::vector<double> peak_times;  // s*_R, ascending
};

/// One regression data point: a support peak time and the bistatic direction
/// sum at that time.
struct PeakSample {
    double s_star = 0.0;
    Vec3 direction = Vec3::Zero();
    int receiver = 0;
};

struct RotationEstimate {
    double theta_hat = 0.0;
    double phi_hat = 0.0;
    double omega_hat = 0.0;
    double loss_value = 0.0;
    bool flat_loss_warning = false;
    std::vector<PeakSample> data;
    std::vector<SupportTrace> traces;
};

struct EstimationOptions {
    double alpha = 0.001;        // support threshold (relative to the pulse max)
    int smooth_window = 100;     // Gaussian smoothing window [slow-time steps]
    int theta_grid = 64;
    int phi_grid = 128;
    int omega_candidates = 41;
    double omega_span = 0.2;     // scanned fraction around the periodicity prior
    double simplex_tol = 1e-6;
};

/// tau_supp(s) = 2 * max{ tau : |C_R(s, tau)| >= alpha * max_tau |C_R(s, tau)| }.
SupportTrace support_trace(const CorrelationSet& correlations, int receiver, double alpha);

/// Gaussian smoothing (sigma = window/6, truncated at +-window/2) followed by
/// strict local-maximum extraction with minimum separation window/2. Peaks
/// closer than window/2 to either end of the trace are discarded.
std::vector<double> smooth_and_find_peaks(SupportTrace& trace, int window);

/// d_R(s) = unit(x_L - x_E) + unit(x_L - x_R) * gamma_R.
Vec3 direction_vector(double s, const ArrayLayout& layout, int receiver,
                      const Trajectory& trajectory);

/// Ratio of the in-plane components of R_frame(phi, theta)^T d. Throws on a
/// vanishing denominator; the loss below uses the atan2 form instead.
double g_ratio(double theta, double phi, const Vec3& d);

/// Mean squared residual of consecutive arctan(g) differences against
/// omega * ds*, with residuals wrapped into (-pi/2, pi/2] (tan has period pi).
double rotation_loss(double theta, double phi, double omega,
                     const std::vector<PeakSample>& data);

/// Full estimator: support traces -> smoothed peaks -> coarse grid scan over
/// (theta, phi) x omega candidates from the support periodicity -> simplex
/// refinement. Throws StageError when fewer than two peaks exist.
RotationEstimate estimate_rotation(const CorrelationSet& correlations,
                                   const ArrayLayout& layout, const Trajectory& trajectory,
                                   const EstimationOptions& options);

/// Loss surface slice L(theta, phi) at fixed omega, for diagnostics export.
MatXd loss_surface(const std::vector<PeakSample>& data, int theta_grid, int phi_grid,
                   double omega);

}  // namespace isar
