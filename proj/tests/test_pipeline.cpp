#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "isar/pipeline.hpp"

using namespace isar;

namespace {

std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string temp_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("isar_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("identical config and seed give byte-identical CSV outputs") {
    ScenarioConfig cfg = preset_config("micro_time");
    cfg.snr_db = 10.0;
    const std::string dir_a = temp_dir("determinism_a");
    const std::string dir_b = temp_dir("determinism_b");
    run_pipeline(cfg, 9, dir_a);
    run_pipeline(cfg, 9, dir_b);

    int compared = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir_a)) {
        if (entry.path().extension() != ".csv") continue;
        const std::string name = entry.path().filename().string();
        CHECK(read_bytes(dir_a + "/" + name) == read_bytes(dir_b + "/" + name));
        ++compared;
    }
    CHECK(compared >= 3);
}

TEST_CASE("stage cache round trip leaves downstream results identical") {
    ScenarioConfig cfg = preset_config("micro_time");
    const std::string cache = temp_dir("cache");
    const std::string dir_a = temp_dir("cache_run_a");
    const std::string dir_b = temp_dir("cache_run_b");

    const PipelineResult fresh = run_pipeline(cfg, 4, dir_a, cache);
    CHECK(std::filesystem::exists(cache + "/echoes.bin"));
    CHECK(std::filesystem::exists(cache + "/correlations.bin"));

    const PipelineResult reloaded = run_pipeline(cfg, 4, dir_b, cache);
    REQUIRE(fresh.rank1.has_value());
    REQUIRE(reloaded.rank1.has_value());
    CHECK((fresh.rank1->image.values - reloaded.rank1->image.values).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK(read_bytes(dir_a + "/image_rank1.csv") == read_bytes(dir_b + "/image_rank1.csv"));
}

TEST_CASE("serialization round trips echoes and correlations exactly") {
    ScenarioConfig cfg = preset_config("micro_time");
    const Scenario scenario = make_scenario(cfg, 2);
    const VecXd omega = frequency_grid(cfg.pulse, 33, 1.5);
    const EchoSetFreq echoes = synthesize_echo_freq(scenario.synthesis_spec(), omega);

    const std::string dir = temp_dir("serial");
    write_echoes(dir + "/e.bin", echoes);
    const EchoSetFreq back = read_echoes(dir + "/e.bin");
    CHECK(back.slow_times == echoes.slow_times);
    CHECK(back.omega == echoes.omega);
    for (int r = 0; r < echoes.receiver_count(); ++r)
        CHECK(back.spectra[r] == echoes.spectra[r]);

    const CorrelationSet set =
        correlate(echoes, cfg.pulse, scenario.trajectory, scenario.correlation_options());
    write_correlations(dir + "/c.bin", set);
    const CorrelationSet set_back = read_correlations(dir + "/c.bin");
    CHECK(set_back.lags == set.lags);
    CHECK(set_back.reference_position == set.reference_position);
    for (int r = 0; r < set.receiver_count(); ++r) {
        CHECK(set_back.spectra[r] == set.spectra[r]);
        CHECK(set_back.auto_corr[r] == set.auto_corr[r]);
    }
}

TEST_CASE("pulse slicing is centered") {
    ScenarioConfig cfg = preset_config("micro_time");
    cfg.pulse.num_pulses = 7;
    const Scenario scenario = make_scenario(cfg, 2);
    const VecXd omega = frequency_grid(cfg.pulse, 9, 1.5);
    const EchoSetFreq echoes = synthesize_echo_freq(scenario.synthesis_spec(), omega);
    const EchoSetFreq sliced = slice_pulses(echoes, 3);
    CHECK(sliced.pulse_count() == 3);
    CHECK(sliced.slow_times(1) == doctest::Approx(0.0));
    CHECK(sliced.spectra[0] == echoes.spectra[0].middleRows(2, 3));
}

TEST_CASE("report carries metrics and the summary mentions them") {
    ScenarioConfig cfg = preset_config("micro_time");
    const std::string dir = temp_dir("report");
    const PipelineResult result = run_pipeline(cfg, 5, dir);
    CHECK(result.report.metric("rank1_peaks_detected") >= 1.0);
    CHECK(result.report.summary().find("stage timings") != std::string::npos);
    CHECK(std::filesystem::exists(dir + "/metrics.csv"));
    CHECK(std::filesystem::exists(dir + "/report.txt"));
    CHECK(std::filesystem::exists(dir + "/image_rank1.pgm"));
    CHECK_THROWS_AS(result.report.metric("no_such_metric"), Error);
}

TEST_CASE("sweep records per-run errors and keeps going") {
    ScenarioConfig cfg = preset_config("micro_time");
    const std::string dir = temp_dir("sweep");
    const auto reports = run_sweep(cfg, "theta_rot", {0.75 * kPi, 99.0, 0.5 * kPi}, 3, dir, 2);
    REQUIRE(reports.size() == 3);
    CHECK(reports[0].error.empty());
    CHECK(!reports[1].error.empty());
    CHECK(reports[2].error.empty());
    CHECK(std::filesystem::exists(dir + "/sweep.csv"));

    CHECK_THROWS_AS(run_sweep(cfg, "carrier", {1.0}, 3, dir, 1), ConfigError);
}

TEST_CASE("kernel maps are exported") {
    ScenarioConfig cfg = preset_config("desk_single");
    const std::string dir = temp_dir("kernels");
    write_kernel_maps(cfg, dir);
    CHECK(std::filesystem::exists(dir + "/kernel_array.csv"));
    CHECK(std::filesystem::exists(dir + "/kernel_effective_theta_3pi_4.csv"));
    CHECK(std::filesystem::exists(dir + "/kernel_bessel.csv"));
    const MatXd ba = read_csv(dir + "/kernel_array.csv");
    CHECK(ba.rows() == 101);
    CHECK(ba.maxCoeff() == doctest::Approx(cfg.receiver_area * cfg.receiver_area));
}

TEST_CASE("rotation_source=estimate without estimation is rejected") {
    ScenarioConfig cfg = preset_config("micro_time");
    cfg.estimation_enabled = false;
    cfg.rotation_source = RotationSource::kEstimate;
    CHECK_THROWS_AS(run_pipeline(cfg, 1, ""), StageError);
}

}  // TEST_SUITE
