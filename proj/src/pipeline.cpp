#include "isar/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "isar/resolution.hpp"

namespace isar {
namespace {

class StageTimer {
public:
    explicit StageTimer(std::vector<StageTiming>& sink) : sink_(sink) {}

    template <typename F>
    auto run(const std::string& name, F&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if constexpr (std::is_void_v<decltype(f())>) {
                f();
                record(name, t0);
            } else {
                auto out = f();
                record(name, t0);
                return out;
            }
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError(name, e.what());
        }
    }

private:
    void record(const std::string& name, std::chrono::steady_clock::time_point t0) {
        const auto dt = std::chrono::steady_clock::now() - t0;
        sink_.push_back({name, std::chrono::duration<double>(dt).count()});
    }

    std::vector<StageTiming>& sink_;
};

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 0x632be59bd9b4e019ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    return z ^ (z >> 31);
}

double relative_angle_error(double estimate, double truth) {
    double d = std::abs(estimate - truth);
    d = std::min(d, std::abs(2.0 * kPi - d));  // angles identify mod 2*pi
    return d / std::max(std::abs(truth), 1e-12);
}

MatXd image_as_matrix(const Image& image) {
    MatXd m(image.grid.ny(), image.grid.nx());
    for (int iy = 0; iy < image.grid.ny(); ++iy)
        for (int ix = 0; ix < image.grid.nx(); ++ix)
            m(iy, ix) = image.values(iy * image.grid.nx() + ix);
    return m;
}

std::vector<Vec2> truth_positions(const Scenario& scenario) {
    std::vector<Vec2> out;
    for (const Vec3& y : scenario.scene.offsets) out.push_back(y.head<2>());
    return out;
}

// Peak metrics shared by runs and sweeps: detector settings are fixed so the
// counts are comparable across images and parameter values.
constexpr double kPeakThreshold = 0.25;
constexpr int kPeakSeparationCells = 2;

void append_image_metrics(RunReport& report, const std::string& tag, const Image& image,
                          const std::vector<Vec2>& truths) {
    const auto peaks = detect_peaks(image, kPeakThreshold, kPeakSeparationCells);
    report.metrics.emplace_back(tag + "_peaks_detected", static_cast<double>(peaks.size()));
    report.metrics.emplace_back(
        tag + "_peaks_matched",
        static_cast<double>(count_matched_peaks(peaks, truths, image.grid.spacing)));
    double fwhm_sum = 0.0;
    int fwhm_count = 0;
    for (const Vec2& t : truths) {
        try {
            const double wx = measure_spot(image, t, Vec2(1.0, 0.0));
            const double wy = measure_spot(image, t, Vec2(0.0, 1.0));
            fwhm_sum += 0.5 * (wx + wy);
            ++fwhm_count;
        } catch (const Error&) {
            // unmeasurable spot (merged or off-peak); reflected in the counts
        }
    }
    report.metrics.emplace_back(tag + "_mean_fwhm",
                                fwhm_count ? fwhm_sum / fwhm_count
                                           : std::numeric_limits<double>::quiet_NaN());
}

void write_estimation_diagnostics(const std::string& dir, const RotationEstimate& estimate,
                                  RunReport& report) {
    for (const SupportTrace& trace : estimate.traces) {
        MatXd m(trace.slow_times.size(), 3);
        m.col(0) = trace.slow_times;
        m.col(1) = trace.support;
        m.col(2) = trace.smoothed;
        const std::string path =
            dir + "/support_receiver_" + std::to_string(trace.receiver) + ".csv";
        write_csv(path, {"s", "tau_supp", "tau_supp_smoothed"}, m);
        report.files.push_back(path);
    }
    MatXd peaks(estimate.data.size(), 5);
    for (std::size_t i = 0; i < estimate.data.size(); ++i) {
        peaks(i, 0) = estimate.data[i].s_star;
        peaks(i, 1) = estimate.data[i].receiver;
        peaks.row(i).tail(3) = estimate.data[i].direction.transpose();
    }
    write_csv(dir + "/peaks.csv", {"s_star", "receiver", "d_x", "d_y", "d_z"}, peaks);
    report.files.push_back(dir + "/peaks.csv");

    write_csv(dir + "/loss_theta_phi.csv",
              loss_surface(estimate.data, 64, 128, estimate.omega_hat));
    report.files.push_back(dir + "/loss_theta_phi.csv");

    const int n_w = 101;
    MatXd loss_w(n_w, 2);
    for (int i = 0; i < n_w; ++i) {
        const double w = estimate.omega_hat * (0.7 + 0.6 * i / (n_w - 1));
        loss_w(i, 0) = w;
        loss_w(i, 1) = rotation_loss(estimate.theta_hat, estimate.phi_hat, w, estimate.data);
    }
    write_csv(dir + "/loss_omega.csv", {"omega", "loss"}, loss_w);
    report.files.push_back(dir + "/loss_omega.csv");
}

void write_metrics_csv(const std::string& path, const RunReport& report) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << "metric,value\n";
    char buf[64];
    for (const auto& [k, v] : report.metrics) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << k << ',' << buf << '\n';
    }
}

}  // namespace

double RunReport::metric(const std::string& name) const {
    for (const auto& [k, v] : metrics)
        if (k == name) return v;
    throw Error("metric not found: " + name);
}

std::string RunReport::summary() const {
    std::ostringstream out;
    out << "rotation truth: theta=" << truth.theta_rot << " phi=" << truth.phi_rot
        << " omega=" << truth.omega_r << "\n";
    if (estimation_ran) {
        out << "rotation estimate: theta=" << theta_hat << " phi=" << phi_hat
            << " omega=" << omega_hat << "\n";
        out << "relative errors: theta=" << theta_err_rel << " phi=" << phi_err_rel
            << " omega=" << omega_err_rel << (flat_loss_warning ? "  [flat loss]" : "") << "\n";
    }
    if (eigenvalues.size() > 0) {
        out << "eigenvalues:";
        for (int i = 0; i < eigenvalues.size(); ++i) out << ' ' << eigenvalues(i);
        out << "\n";
    }
    for (const auto& [k, v] : metrics) out << k << " = " << v << "\n";
    out << "stage timings [s]:\n";
    for (const StageTiming& t : timings) out << "  " << t.name << ": " << t.seconds << "\n";
    if (!error.empty()) out << "error: " << error << "\n";
    return out.str();
}

CorrelationSet slice_pulses(const CorrelationSet& set, int n) {
    if (n <= 0 || n >= set.pulse_count()) return set;
    const int start = (set.pulse_count() - n) / 2;
    CorrelationSet out = set;
    out.slow_times = set.slow_times.segment(start, n);
    for (int r = 0; r < set.receiver_count(); ++r) {
        out.spectra[r] = set.spectra[r].middleRows(start, n);
        out.auto_corr[r] = set.auto_corr[r].middleRows(start, n);
    }
    return out;
}

EchoSetFreq slice_pulses(const EchoSetFreq& echoes, int n) {
    if (n <= 0 || n >= echoes.pulse_count()) return echoes;
    const int start = (echoes.pulse_count() - n) / 2;
    EchoSetFreq out = echoes;
    out.slow_times = echoes.slow_times.segment(start, n);
    for (int r = 0; r < echoes.receiver_count(); ++r)
        out.spectra[r] = echoes.spectra[r].middleRows(start, n);
    return out;
}

PipelineResult run_pipeline(const ScenarioConfig& config, std::uint64_t seed,
                            const std::string& out_dir, const std::string& stage_cache) {
    PipelineResult result;
    RunReport& report = result.report;
    StageTimer timer(report.timings);
    report.truth = config.rotation;

    if (!out_dir.empty()) ensure_directory(out_dir);
    if (!stage_cache.empty()) ensure_directory(stage_cache);

    result.scenario = timer.run("scenario", [&] { return make_scenario(config, seed); });
    const Scenario& scenario = result.scenario;
    const VecXd omega = frequency_grid(config.pulse, config.freq_bins, config.band_factor);

    const std::string echo_cache = stage_cache.empty() ? "" : stage_cache + "/echoes.bin";
    if (!echo_cache.empty() && std::filesystem::exists(echo_cache)) {
        result.echoes = timer.run("synthesize", [&] { return read_echoes(echo_cache); });
    } else {
        result.echoes = timer.run("synthesize", [&] {
            const SynthesisSpec spec = scenario.synthesis_spec();
            if (config.synthesis_domain == "time") {
                EchoSetTime raw = synthesize_echo_time(spec);
                if (!std::isinf(config.snr_db))
                    raw = add_noise(raw, config.snr_db, mix(config.noise_seed, seed));
                return echoes_to_spectra(raw, scenario.layout, scenario.trajectory, omega);
            }
            EchoSetFreq echoes = synthesize_echo_freq(spec, omega);
            if (!std::isinf(config.snr_db))
                echoes = add_noise(echoes, config.snr_db, mix(config.noise_seed, seed));
            return echoes;
        });
        if (!echo_cache.empty()) {
            write_echoes(echo_cache, result.echoes);
            report.files.push_back(echo_cache);
        }
    }

    const std::string corr_cache = stage_cache.empty() ? "" : stage_cache + "/correlations.bin";
    if (!corr_cache.empty() && std::filesystem::exists(corr_cache)) {
        result.correlations = timer.run("correlate", [&] { return read_correlations(corr_cache); });
    } else {
        result.correlations = timer.run("correlate", [&] {
            return correlate(result.echoes, config.pulse, scenario.trajectory,
                             scenario.correlation_options());
        });
        if (!corr_cache.empty()) {
            write_correlations(corr_cache, result.correlations);
            report.files.push_back(corr_cache);
        }
    }

    RotationParams imaging_rotation = config.rotation;
    if (config.estimation_enabled) {
        result.estimate = timer.run("estimate", [&] {
            return estimate_rotation(result.correlations, scenario.layout, scenario.trajectory,
                                     scenario.estimation_options());
        });
        const RotationEstimate& est = *result.estimate;
        report.estimation_ran = true;
        report.theta_hat = est.theta_hat;
        report.phi_hat = est.phi_hat;
        report.omega_hat = est.omega_hat;
        report.flat_loss_warning = est.flat_loss_warning;
        report.theta_err_rel = relative_angle_error(est.theta_hat, config.rotation.theta_rot);
        report.phi_err_rel = relative_angle_error(est.phi_hat, config.rotation.phi_rot);
        report.omega_err_rel = std::abs(est.omega_hat - config.rotation.omega_r) /
                               std::max(config.rotation.omega_r, 1e-12);
        report.metrics.emplace_back("theta_err_rel", report.theta_err_rel);
        report.metrics.emplace_back("phi_err_rel", report.phi_err_rel);
        report.metrics.emplace_back("omega_err_rel", report.omega_err_rel);
        if (!out_dir.empty())
            write_estimation_diagnostics(out_dir, est, report);
    }
    if (config.rotation_source == RotationSource::kEstimate) {
        if (!result.estimate)
            throw StageError("image", "rotation_source=estimate but estimation is disabled");
        imaging_rotation = {result.estimate->theta_hat, result.estimate->phi_hat,
                            result.estimate->omega_hat};
    } else if (config.rotation_source == RotationSource::kNone) {
        imaging_rotation = {0.0, 0.0, 0.0};
    }

    const bool any_image = config.image_single || config.image_rank1 || config.image_kirchhoff;
    if (any_image && scenario.scene.size() > 0) {
        const ImageGrid grid = scenario.image_grid();
        const CorrelationSet sliced = slice_pulses(result.correlations, config.aperture_pulses);
        const MigrationSpec mig_spec = scenario.migration_spec(imaging_rotation);
        const std::vector<Vec2> truths = truth_positions(scenario);

        if (config.image_single || config.image_rank1) {
            result.interference = timer.run("migrate", [&] {
                return migrate_two_point(sliced, mig_spec, grid);
            });
        }
        if (config.image_single) {
            result.single_point = timer.run("image_single", [&] {
                return image_single_point(*result.interference);
            });
            append_image_metrics(report, "single", *result.single_point, truths);
        }
        if (config.image_rank1) {
            result.rank1 = timer.run("image_rank1", [&] { return image_rank1(*result.interference); });
            append_image_metrics(report, "rank1", result.rank1->image, truths);
            report.metrics.emplace_back("rank1_eigenvalue", result.rank1->eigenvalue);
            report.metrics.emplace_back("rank1_degenerate_pair",
                                        result.rank1->degenerate_pair_warning ? 1.0 : 0.0);
        }
        if (config.image_kirchhoff) {
            result.kirchhoff = timer.run("image_kirchhoff", [&] {
                const EchoSetFreq sliced_echoes = slice_pulses(result.echoes, config.aperture_pulses);
                // Kirchhoff migrates the imaging band of the field data.
                EchoSetFreq band = sliced_echoes;
                const int stride = std::max(1, config.imaging_band_stride);
                const int keep = (sliced_echoes.bin_count() + stride - 1) / stride;
                band.omega = VecXd(keep);
                for (int m = 0; m < keep; ++m) band.omega(m) = sliced_echoes.omega(m * stride);
                for (int r = 0; r < band.receiver_count(); ++r) {
                    MatXcd d(band.pulse_count(), keep);
                    for (int m = 0; m < keep; ++m) d.col(m) = sliced_echoes.spectra[r].col(m * stride);
                    band.spectra[r] = std::move(d);
                }
                return image_kirchhoff(band, mig_spec, grid);
            });
            append_image_metrics(report, "kirchhoff", *result.kirchhoff, truths);
        }
        if (result.interference) {
            const int m = std::min(config.eigen_count, grid.size());
            result.spectrum = timer.run("eigen_spectrum", [&] {
                return eigen_spectrum(result.interference->matrix, m);
            });
            report.eigenvalues = result.spectrum.values;
            if (m >= 2)
                report.metrics.emplace_back("lambda2_over_lambda1",
                                            result.spectrum.values(1) /
                                                result.spectrum.values(0));
        }

        if (!out_dir.empty()) {
            auto dump = [&](const Image& image, const std::string& name) {
                write_csv(out_dir + "/image_" + name + ".csv", image_as_matrix(image));
                report.files.push_back(out_dir + "/image_" + name + ".csv");
                if (config.write_pgm) {
                    write_pgm(out_dir + "/image_" + name + ".pgm", image);
                    report.files.push_back(out_dir + "/image_" + name + ".pgm");
                }
            };
            if (result.single_point) dump(*result.single_point, "single");
            if (result.rank1) dump(result.rank1->image, "rank1");
            if (result.kirchhoff) dump(*result.kirchhoff, "kirchhoff");
            if (report.eigenvalues.size() > 0) {
                write_csv(out_dir + "/eigenvalues.csv", report.eigenvalues);
                report.files.push_back(out_dir + "/eigenvalues.csv");
            }
        }
    }

    if (!out_dir.empty()) {
        write_autocorrelation_csv(out_dir + "/autocorrelation_receiver_0.csv",
                                  result.correlations, 0);
        report.files.push_back(out_dir + "/autocorrelation_receiver_0.csv");
        write_metrics_csv(out_dir + "/metrics.csv", report);
        report.files.push_back(out_dir + "/metrics.csv");
        std::ofstream rep(out_dir + "/report.txt");
        rep << report.summary();
        report.files.push_back(out_dir + "/report.txt");
    }
    return result;
}

std::vector<RunReport> run_sweep(const ScenarioConfig& base, const std::string& parameter,
                                 const std::vector<double>& values, std::uint64_t seed,
                                 const std::string& out_dir, int workers) {
    if (parameter != "theta_rot" && parameter != "aperture_pulses" && parameter != "snr_db" &&
        parameter != "alpha")
        throw ConfigError("sweep parameter must be theta_rot, aperture_pulses, snr_db or alpha");
    if (!out_dir.empty()) ensure_directory(out_dir);

    std::vector<RunReport> reports(values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < values.size(); i = next.fetch_add(1)) {
            ScenarioConfig cfg = base;
            if (parameter == "theta_rot") cfg.rotation.theta_rot = values[i];
            else if (parameter == "aperture_pulses") cfg.aperture_pulses = static_cast<int>(values[i]);
            else if (parameter == "snr_db") cfg.snr_db = values[i];
            else cfg.alpha = values[i];
            const std::string run_dir =
                out_dir.empty() ? "" : out_dir + "/" + parameter + "_" + std::to_string(i);
            try {
                reports[i] = run_pipeline(cfg, seed, run_dir).report;
            } catch (const std::exception& e) {
                reports[i].error = e.what();
            }
            reports[i].metrics.emplace_back(parameter, values[i]);
        }
    };
    const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(values.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    if (!out_dir.empty()) {
        // Consolidated metrics: the union of metric names, NaN where missing.
        std::vector<std::string> names{parameter};
        for (const RunReport& r : reports)
            for (const auto& [k, v] : r.metrics)
                if (std::find(names.begin(), names.end(), k) == names.end()) names.push_back(k);
        MatXd table(values.size(), names.size());
        table.setConstant(std::numeric_limits<double>::quiet_NaN());
        for (std::size_t i = 0; i < reports.size(); ++i) {
            table(i, 0) = values[i];
            for (const auto& [k, v] : reports[i].metrics) {
                const auto it = std::find(names.begin(), names.end(), k);
                table(i, it - names.begin()) = v;
            }
        }
        write_csv(out_dir + "/sweep.csv", names, table);
    }
    return reports;
}

void write_kernel_maps(const ScenarioConfig& config, const std::string& out_dir) {
    ensure_directory(out_dir);
    const double omega0 = config.pulse.omega_carrier();
    const double a = config.receiver_area;
    const double h_t = config.target_position.z();
    const double lobe = 2.0 * kPi * kSpeedOfLight * h_t / (omega0 * a);  // first-zero scale
    const double aperture_time = config.pulse.num_pulses * config.pulse.spacing_s;

    const int n = 101;
    const double extent = 3.0 * lobe;
    auto grid_value = [&](int i) { return -extent + 2.0 * extent * i / (n - 1); };

    MatXd ba(n, n);
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix)
            ba(iy, ix) = kernel_array(Vec2(grid_value(ix), grid_value(iy)), omega0, a, h_t);
    write_csv(out_dir + "/kernel_array.csv", ba);

    for (const auto& [name, theta] : std::vector<std::pair<std::string, double>>{
             {"pi", kPi}, {"3pi_4", 0.75 * kPi}, {"pi_2", 0.5 * kPi}}) {
        RotationParams rot{theta, config.rotation.phi_rot, config.rotation.omega_r};
        MatXd beff(n, n);
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix)
                beff(iy, ix) = kernel_effective(Vec2(grid_value(ix), grid_value(iy)), omega0, a,
                                                h_t, rot, aperture_time);
        write_csv(out_dir + "/kernel_effective_theta_" + name + ".csv", beff);
    }

    MatXd j0(1001, 2);
    for (int i = 0; i < 1001; ++i) {
        const double r = 2.0 * config.pulse.wavelength() * i / 1000.0;
        j0(i, 0) = r;
        j0(i, 1) = kernel_rotation_bessel(r, omega0, config.rotation.theta_rot);
    }
    write_csv(out_dir + "/kernel_bessel.csv", {"r", "J0"}, j0);
}

}  // namespace isar
