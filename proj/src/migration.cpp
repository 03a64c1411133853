#include "isar/migration.hpp"

#include <algorithm>
#include <cmath>

namespace isar {
namespace {

// Base phasors P = exp(i*w0*dt) and steps Q = exp(i*dw*dt) per (receiver,
// point) let every later bin reuse one complex multiply per entry.
struct PhasorTable {
    MatXcd base;  // (receiver, point)
    MatXcd step;
};

PhasorTable delay_phasors(double s, const MigrationSpec& spec, std::span<const Vec3> points,
                          double omega0, double domega) {
    const int n_r = spec.layout->receiver_count();
    const int n_k = static_cast<int>(points.size());
    PhasorTable t;
    t.base = MatXcd(n_r, n_k);
    t.step = MatXcd(n_r, n_k);
    for (int r = 0; r < n_r; ++r) {
        for (int k = 0; k < n_k; ++k) {
            const double dt = reduced_travel_time(
                s, *spec.trajectory, spec.rotation, points[k] + spec.rotation_center_offset,
                *spec.layout, r, spec.trajectory->velocity);
            t.base(r, k) = std::polar(1.0, omega0 * dt);
            t.step(r, k) = std::polar(1.0, domega * dt);
        }
    }
    return t;
}

// Shared (pulse outer, bin inner) traversal producing the migrated column
// b = A^H u_hat for every (s, w) cell.
template <typename Sink>
void for_each_migrated_column(const std::vector<MatXcd>& spectra, const VecXd& slow_times,
                              const VecXd& omega, const MigrationSpec& spec,
                              std::span<const Vec3> points, Sink&& sink) {
    spec.rotation.validate();
    if (points.empty()) throw Error("migration: empty search grid");
    const int n_r = static_cast<int>(spectra.size());
    const int n_s = static_cast<int>(slow_times.size());
    const int n_w = static_cast<int>(omega.size());
    const int n_k = static_cast<int>(points.size());
    const double domega = n_w > 1 ? omega(1) - omega(0) : 0.0;

    VecXcd column(n_k);
    for (int i = 0; i < n_s; ++i) {
        PhasorTable phasors = delay_phasors(slow_times(i), spec, points, omega(0), domega);
        MatXcd a = phasors.base;  // A(s, w_m) entries, advanced bin by bin
        for (int m = 0; m < n_w; ++m) {
            if (m > 0) a.array() *= phasors.step.array();
            column.setZero();
            for (int r = 0; r < n_r; ++r)
                column += a.row(r).transpose().conjugate() * spectra[r](i, m);
            sink(i, m, column);
        }
    }
}

double quadratic_peak_offset(double left, double mid, double right) {
    const double denom = left - 2.0 * mid + right;
    if (denom >= 0.0) return 0.0;  // not a strict quadratic maximum
    return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
}

}  // namespace

ImageGrid ImageGrid::square(double half_extent, double spacing) {
    if (!(spacing > 0.0) || !(half_extent >= 0.0))
        throw ConfigError("image grid needs positive spacing and extent");
    ImageGrid g;
    g.spacing = spacing;
    g.half_x = static_cast<int>(std::floor(half_extent / spacing + 1e-9));
    g.half_y = g.half_x;
    g.points.reserve(static_cast<std::size_t>(g.nx()) * g.ny());
    for (int iy = -g.half_y; iy <= g.half_y; ++iy)
        for (int ix = -g.half_x; ix <= g.half_x; ++ix)
            g.points.emplace_back(ix * spacing, iy * spacing, 0.0);
    return g;
}

MatXcd accumulate_interference(const CorrelationSet& correlations, const MigrationSpec& spec,
                               std::span<const Vec3> points) {
    const int n_k = static_cast<int>(points.size());
    const int panel_cols = 64;
    MatXcd panel(n_k, panel_cols);
    int filled = 0;
    MatXcd x = MatXcd::Zero(n_k, n_k);

    auto flush = [&] {
        if (filled == 0) return;
        x.selfadjointView<Eigen::Lower>().rankUpdate(panel.leftCols(filled));
        filled = 0;
    };
    for_each_migrated_column(correlations.spectra, correlations.slow_times, correlations.omega,
                             spec, points, [&](int, int, const VecXcd& column) {
                                 panel.col(filled++) = column;
                                 if (filled == panel_cols) flush();
                             });
    flush();
    x.triangularView<Eigen::StrictlyUpper>() = x.adjoint().triangularView<Eigen::StrictlyUpper>();
    return x;
}

VecXcd accumulate_kirchhoff(const EchoSetFreq& echoes, const MigrationSpec& spec,
                            std::span<const Vec3> points) {
    VecXcd rho = VecXcd::Zero(points.size());
    for_each_migrated_column(echoes.spectra, echoes.slow_times, echoes.omega, spec, points,
                             [&](int, int, const VecXcd& column) { rho += column; });
    return rho;
}

InterferenceMatrix migrate_two_point(const CorrelationSet& correlations,
                                     const MigrationSpec& spec, const ImageGrid& grid) {
    InterferenceMatrix out;
    out.grid = grid;
    out.matrix = accumulate_interference(correlations, spec, grid.points);
    out.pulses_used = correlations.pulse_count();
    out.bins_used = correlations.bin_count();
    out.receivers_used = correlations.receiver_count();
    return out;
}

Image image_single_point(const InterferenceMatrix& interference) {
    Image image;
    image.grid = interference.grid;
    image.kind = Image::Kind::kSinglePoint;
    image.values = interference.matrix.diagonal().real().cwiseMax(0.0);
    const double peak = image.values.maxCoeff();
    if (peak <= 0.0) throw Error("single-point image is identically zero");
    image.values /= peak;
    return image;
}

Rank1Result image_rank1(const InterferenceMatrix& interference,
                        const PowerIterationOptions& options) {
    const MatXcd& x = interference.matrix;
    const int n = static_cast<int>(x.rows());

    VecXcd v(n);
    for (int k = 0; k < n; ++k) v(k) = Complex(1.0 + 1e-3 * k / std::max(1, n - 1), 0.0);
    v /= v.norm();

    Rank1Result result;
    double lambda = 0.0;
    bool converged = false;
    for (int it = 0; it < options.max_iterations; ++it) {
        const VecXcd w = x * v;
        const double next = w.norm() > 0.0 ? std::real(v.dot(w)) : 0.0;
        if (w.norm() == 0.0) throw Error("rank-1 image: matrix annihilates the start vector");
        v = w / w.norm();
        result.iterations = it + 1;
        if (it > 0 && std::abs(next - lambda) <= options.eigenvalue_tol * std::abs(next)) {
            lambda = next;
            converged = true;
            break;
        }
        lambda = next;
    }
    if (!converged) {
        const double residual = (x * v - lambda * v).norm() / std::max(lambda, 1e-300);
        throw Error("rank-1 image: power iteration did not converge; relative residual " +
                    std::to_string(residual));
    }
    result.eigenvalue = lambda;

    // Short deflated run to flag a near-degenerate top pair.
    VecXcd u(n);
    for (int k = 0; k < n; ++k) u(k) = Complex(1.0, 1e-3 * (n - k) / std::max(1, n - 1));
    u -= v * v.dot(u);
    if (u.norm() > 0.0) {
        u /= u.norm();
        for (int it = 0; it < 50; ++it) {
            VecXcd w = x * u;
            w -= v * v.dot(w);
            if (w.norm() == 0.0) break;
            u = w / w.norm();
        }
        result.lambda2_estimate = std::real(u.dot(x * u));
        result.degenerate_pair_warning =
            (lambda - result.lambda2_estimate) < 1e-6 * lambda;
    }

    int k_max = 0;
    v.cwiseAbs().maxCoeff(&k_max);
    const Complex phase = v(k_max) / std::abs(v(k_max));
    v *= std::conj(phase);

    result.image.grid = interference.grid;
    result.image.kind = Image::Kind::kRank1;
    result.image.values = v.cwiseAbs2();
    result.image.values /= result.image.values.maxCoeff();
    return result;
}

EigenPairs eigen_spectrum(const MatXcd& matrix, int count) {
    const int n = static_cast<int>(matrix.rows());
    if (count < 1 || count > n) throw Error("eigen_spectrum: count out of range");
    const int block = std::min(n, count + 4);

    MatXcd q(n, block);
    for (int j = 0; j < block; ++j)
        for (int k = 0; k < n; ++k)
            q(k, j) = Complex(1.0 + std::cos((j + 1.0) * (k + 1.0)), 1e-3 * std::sin((j + 2.0) * k));
    q = Eigen::HouseholderQR<MatXcd>(q).householderQ() * MatXcd::Identity(n, block);

    EigenPairs out;
    const int max_iterations = 3000;
    double residual_scale = 1.0;
    for (int it = 0; it < max_iterations; ++it) {
        const MatXcd z = matrix * q;
        const MatXcd t = q.adjoint() * z;
        Eigen::SelfAdjointEigenSolver<MatXcd> small(t);
        // Ritz extraction, descending.
        MatXcd ritz_vectors(n, block);
        VecXd ritz_values(block);
        for (int j = 0; j < block; ++j) {
            ritz_values(j) = small.eigenvalues()(block - 1 - j);
            ritz_vectors.col(j) = q * small.eigenvectors().col(block - 1 - j);
        }
        residual_scale = std::max(std::abs(ritz_values(0)), 1e-300);
        bool done = true;
        for (int j = 0; j < count && done; ++j) {
            const double res = (matrix * ritz_vectors.col(j) - ritz_values(j) * ritz_vectors.col(j)).norm();
            if (res > 1e-8 * residual_scale) done = false;
        }
        if (done || it == max_iterations - 1) {
            if (!done)
                throw Error("eigen_spectrum: residual tolerance not reached");
            out.values = ritz_values.head(count);
            out.vectors = ritz_vectors.leftCols(count);
            return out;
        }
        q = Eigen::HouseholderQR<MatXcd>(z).householderQ() * MatXcd::Identity(n, block);
    }
    throw Error("eigen_spectrum: no convergence");
}

Image image_kirchhoff(const EchoSetFreq& echoes, const MigrationSpec& spec,
                      const ImageGrid& grid) {
    Image image;
    image.grid = grid;
    image.kind = Image::Kind::kKirchhoff;
    image.values = accumulate_kirchhoff(echoes, spec, grid.points).cwiseAbs();
    const double peak = image.values.maxCoeff();
    if (peak <= 0.0) throw Error("Kirchhoff image is identically zero");
    image.values /= peak;
    return image;
}

namespace {

double bilinear_sample(const Image& image, const Vec2& p) {
    const ImageGrid& g = image.grid;
    const double fx = p.x() / g.spacing + g.half_x;
    const double fy = p.y() / g.spacing + g.half_y;
    if (fx < 0.0 || fy < 0.0 || fx > g.nx() - 1 || fy > g.ny() - 1)
        throw Error("measure_spot: sample outside the image grid");
    const int ix = std::min(static_cast<int>(fx), g.nx() - 2);
    const int iy = std::min(static_cast<int>(fy), g.ny() - 2);
    const double ax = fx - ix, ay = fy - iy;
    auto at = [&](int jx, int jy) { return image.values((jy) * g.nx() + jx); };
    return (1 - ax) * (1 - ay) * at(ix, iy) + ax * (1 - ay) * at(ix + 1, iy) +
           (1 - ax) * ay * at(ix, iy + 1) + ax * ay * at(ix + 1, iy + 1);
}

}  // namespace

double measure_spot(const Image& image, const Vec2& near, const Vec2& direction) {
    const ImageGrid& g = image.grid;
    const int cx = static_cast<int>(std::round(near.x() / g.spacing));
    const int cy = static_cast<int>(std::round(near.y() / g.spacing));

    int best_ix = 0, best_iy = 0;
    double best = -1.0;
    for (int iy = cy - 2; iy <= cy + 2; ++iy) {
        for (int ix = cx - 2; ix <= cx + 2; ++ix) {
            if (std::abs(ix) > g.half_x || std::abs(iy) > g.half_y) continue;
            const double v = image.values(g.index(ix, iy));
            if (v > best) { best = v; best_ix = ix; best_iy = iy; }
        }
    }
    if (best < 0.0) throw Error("measure_spot: peak not found near the given position");

    // Require a strict interior local maximum.
    bool strict = std::abs(best_ix) < g.half_x && std::abs(best_iy) < g.half_y;
    if (strict) {
        for (int dy = -1; dy <= 1 && strict; ++dy)
            for (int dx = -1; dx <= 1 && strict; ++dx)
                if ((dx || dy) && image.values(g.index(best_ix + dx, best_iy + dy)) >= best)
                    strict = false;
    }
    if (!strict) throw Error("measure_spot: peak not found near the given position");

    const double ox = quadratic_peak_offset(image.values(g.index(best_ix - 1, best_iy)), best,
                                            image.values(g.index(best_ix + 1, best_iy)));
    const double oy = quadratic_peak_offset(image.values(g.index(best_ix, best_iy - 1)), best,
                                            image.values(g.index(best_ix, best_iy + 1)));
    const Vec2 peak((best_ix + ox) * g.spacing, (best_iy + oy) * g.spacing);
    const double peak_value = bilinear_sample(image, peak);
    const double half = 0.5 * peak_value;
    const Vec2 dir = direction.normalized();

    auto crossing = [&](double sign) {
        const double step = g.spacing / 8.0;
        double prev_r = 0.0, prev_v = peak_value;
        for (double r = step; r < 4.0 * g.spacing * (g.half_x + g.half_y); r += step) {
            const double v = bilinear_sample(image, peak + sign * r * dir);
            if (v <= half) {
                const double f = (prev_v - half) / std::max(prev_v - v, 1e-300);
                return prev_r + f * (r - prev_r);
            }
            prev_r = r;
            prev_v = v;
        }
        throw Error("measure_spot: half-max crossing not reached inside the grid");
    };
    return crossing(+1.0) + crossing(-1.0);
}

std::vector<DetectedPeak> detect_peaks(const Image& image, double rel_threshold,
                                       int min_separation_cells) {
    const ImageGrid& g = image.grid;
    const double floor = rel_threshold * image.values.maxCoeff();

    std::vector<DetectedPeak> candidates;
    for (int iy = -g.half_y + 1; iy < g.half_y; ++iy) {
        for (int ix = -g.half_x + 1; ix < g.half_x; ++ix) {
            const double v = image.values(g.index(ix, iy));
            if (v < floor) continue;
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy)
                for (int dx = -1; dx <= 1 && is_max; ++dx)
                    if ((dx || dy) && image.values(g.index(ix + dx, iy + dy)) >= v) is_max = false;
            if (!is_max) continue;
            const double ox = quadratic_peak_offset(image.values(g.index(ix - 1, iy)), v,
                                                    image.values(g.index(ix + 1, iy)));
            const double oy = quadratic_peak_offset(image.values(g.index(ix, iy - 1)), v,
                                                    image.values(g.index(ix, iy + 1)));
            candidates.push_back({Vec2((ix + ox) * g.spacing, (iy + oy) * g.spacing), v});
        }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const DetectedPeak& a, const DetectedPeak& b) { return a.value > b.value; });

    std::vector<DetectedPeak> peaks;
    const double min_dist = min_separation_cells * g.spacing;
    for (const DetectedPeak& c : candidates) {
        bool keep = true;
        for (const DetectedPeak& p : peaks)
            if ((p.position - c.position).norm() < min_dist) { keep = false; break; }
        if (keep) peaks.push_back(c);
    }
    return peaks;
}

int count_matched_peaks(const std::vector<DetectedPeak>& peaks,
                        const std::vector<Vec2>& truths, double radius) {
    std::vector<bool> used(peaks.size(), false);
    int matched = 0;
    for (const Vec2& t : truths) {
        int best = -1;
        double best_dist = radius;
        for (std::size_t i = 0; i < peaks.size(); ++i) {
            if (used[i]) continue;
            const double d = (peaks[i].position - t).norm();
            if (d <= best_dist) { best_dist = d; best = static_cast<int>(i); }
        }
        if (best >= 0) { used[best] = true; ++matched; }
    }
    return matched;
}

}  // namespace isar
