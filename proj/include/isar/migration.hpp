#pragma once

#include <span>
#include <vector>

#include "isar/correlation.hpp"

namespace isar {

/// Uniform planar search grid around the window center. Counts are odd so the
/// origin is always a grid point; index k = (iy + half_y)*nx + (ix + half_x).
struct ImageGrid {
    double spacing = 0.0;
    int half_x = 0;
    int half_y = 0;
    std::vector<Vec3> points;

    static ImageGrid square(double half_extent, double spacing);

    int nx() const { return 2 * half_x + 1; }
    int ny() const { return 2 * half_y + 1; }
    int size() const { return static_cast<int>(points.size()); }
    int index(int ix, int iy) const { return (iy + half_y) * nx() + (ix + half_x); }
    Vec2 point2(int k) const { return points[k].head<2>(); }
};

/// Two-point migrated cross-correlation data: K x K Hermitian PSD matrix over
/// grid-point pairs.
struct InterferenceMatrix {
    MatXcd matrix;
    ImageGrid grid;
    int pulses_used = 0;
    int bins_used = 0;
    int receivers_used = 0;
};

struct Image {
    enum class Kind { kSinglePoint, kRank1, kKirchhoff };
    VecXd values;  // >= 0, max = 1
    ImageGrid grid;
    Kind kind = Kind::kSinglePoint;
};

/// Imaging-side view of the scene geometry (estimated or true rotation).
struct MigrationSpec {
    const ArrayLayout* layout = nullptr;
    const Trajectory* trajectory = nullptr;
    RotationParams rotation;
    Vec3 rotation_center_offset = Vec3::Zero();
};

/// Factorized accumulation of the interference matrix over arbitrary search
/// points: X += (A^H u)(A^H u)^H per (pulse, bin); receiver pairs are never
/// materialized. Column order is pulse-major (s outer, w inner), receivers
/// vectorized; the floating-point reduction order is fixed.
MatXcd accumulate_interference(const CorrelationSet& correlations, const MigrationSpec& spec,
                               std::span<const Vec3> points);

/// Same traversal for linear Kirchhoff migration: rho_tilde = sum A^H u_hat.
VecXcd accumulate_kirchhoff(const EchoSetFreq& echoes, const MigrationSpec& spec,
                            std::span<const Vec3> points);

InterferenceMatrix migrate_two_point(const CorrelationSet& correlations,
                                     const MigrationSpec& spec, const ImageGrid& grid);

/// Diagonal of the interference matrix, clipped at zero and normalized.
Image image_single_point(const InterferenceMatrix& interference);

struct PowerIterationOptions {
    double eigenvalue_tol = 1e-10;
    int max_iterations = 10000;
};

struct Rank1Result {
    Image image;
    double eigenvalue = 0.0;
    double lambda2_estimate = 0.0;
    bool degenerate_pair_warning = false;
    int iterations = 0;
};

/// |v1|^2 of the top eigenvector by power iteration; phase fixed by making the
/// largest-magnitude entry real positive.
Rank1Result image_rank1(const InterferenceMatrix& interference,
                        const PowerIterationOptions& options = {});

struct EigenPairs {
    VecXd values;   // descending
    MatXcd vectors; // columns
};

/// Leading eigenpairs by blocked power iteration with orthogonalization
/// (deflation-equivalent); residuals ||Xv - lambda v|| <= 1e-8 * lambda_1.
EigenPairs eigen_spectrum(const MatXcd& matrix, int count);

Image image_kirchhoff(const EchoSetFreq& echoes, const MigrationSpec& spec,
                      const ImageGrid& grid);

/// Full width at half maximum through the image peak nearest `near`, along a
/// unit direction, by bilinear sampling and linear interpolation of the
/// half-max crossings.
double measure_spot(const Image& image, const Vec2& near, const Vec2& direction);

struct DetectedPeak {
    Vec2 position = Vec2::Zero();
    double value = 0.0;
};

/// Strict local maxima above rel_threshold * max, separated by at least
/// min_separation_cells, refined to subcell accuracy by quadratic fits.
std::vector<DetectedPeak> detect_peaks(const Image& image, double rel_threshold,
                                       int min_separation_cells);

/// Number of `truths` that have a detected peak within `radius` (greedy
/// nearest-match, each peak used once).
int count_matched_peaks(const std::vector<DetectedPeak>& peaks,
                        const std::vector<Vec2>& truths, double radius);

}  // namespace isar
