#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "isar/io.hpp"
#include "isar/scenario.hpp"

namespace isar {

struct StageTiming {
    std::string name;
    double seconds = 0.0;
};

/// Flat, deterministic run summary. Metrics are written to metrics.csv in
/// insertion order; timings only go to the plain-text report.
struct RunReport {
    RotationParams truth;
    bool estimation_ran = false;
    double theta_hat = 0.0, phi_hat = 0.0, omega_hat = 0.0;
    double theta_err_rel = 0.0, phi_err_rel = 0.0, omega_err_rel = 0.0;
    bool flat_loss_warning = false;
    VecXd eigenvalues;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<StageTiming> timings;
    std::vector<std::string> files;
    std::string error;  // set when a sweep entry failed

    double metric(const std::string& name) const;
    std::string summary() const;
};

struct PipelineResult {
    Scenario scenario;
    EchoSetFreq echoes;
    CorrelationSet correlations;
    std::optional<RotationEstimate> estimate;
    std::optional<InterferenceMatrix> interference;
    std::optional<Image> single_point;
    std::optional<Rank1Result> rank1;
    std::optional<Image> kirchhoff;
    EigenPairs spectrum;
    RunReport report;
};

/// Centered slow-time slice (the synthetic aperture actually migrated).
CorrelationSet slice_pulses(const CorrelationSet& set, int n);
EchoSetFreq slice_pulses(const EchoSetFreq& echoes, int n);

/// synthesize -> noise -> correlate -> estimate -> migrate -> images/metrics.
/// Artifacts are written under out_dir if non-empty; echoes/correlations are
/// reused from stage_cache when files are present there.
PipelineResult run_pipeline(const ScenarioConfig& config, std::uint64_t seed,
                            const std::string& out_dir = "", const std::string& stage_cache = "");

/// Independent runs over one swept parameter; per-run errors are recorded and
/// the sweep continues. Every run uses the same base seed.
std::vector<RunReport> run_sweep(const ScenarioConfig& base, const std::string& parameter,
                                 const std::vector<double>& values, std::uint64_t seed,
                                 const std::string& out_dir, int workers = 1);

/// Export the analysis kernels (array PSF, rotation-averaged PSF, Bessel
/// kernel) for the scenario's parameters.
void write_kernel_maps(const ScenarioConfig& config, const std::string& out_dir);

}  // namespace isar
