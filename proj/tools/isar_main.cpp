#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <sstream>

#include "isar/pipeline.hpp"

namespace {

isar::ScenarioConfig resolve_config(const std::string& config_path, const std::string& preset) {
    if (!config_path.empty() && !preset.empty())
        throw isar::ConfigError("pass either --config or --preset, not both");
    if (!config_path.empty()) return isar::load_config(config_path);
    if (!preset.empty()) return isar::preset_config(preset);
    throw isar::ConfigError("a scenario is required: --config <path> or --preset <name>");
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream in(csv);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw isar::ConfigError("--values must list at least one number");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"correlation-based iSAR simulation and imaging toolkit"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir = "out", stage_cache;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "scenario config file")->capture_default_str();
    app.add_option("--preset", preset, "built-in scenario: desk, desk_single, micro_time, paper_full");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", seed, "base seed for receiver placement and noise")
        ->capture_default_str();
    app.add_option("--stage-cache", stage_cache, "directory for reusable stage artifacts");

    auto* simulate = app.add_subcommand("simulate", "synthesize echoes and correlations");
    auto* estimate = app.add_subcommand("estimate", "recover the rotation parameters");
    auto* image = app.add_subcommand("image", "run the full pipeline and write images");
    auto* sweep = app.add_subcommand("sweep", "repeat the pipeline over one parameter");
    auto* kernels = app.add_subcommand("kernels", "export the resolution-analysis kernels");

    std::string sweep_param, sweep_values;
    int workers = 1;
    sweep->add_option("--param", sweep_param, "theta_rot | aperture_pulses | snr_db | alpha")
        ->required();
    sweep->add_option("--values", sweep_values, "comma-separated parameter values")->required();
    sweep->add_option("--workers", workers, "concurrent runs")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        isar::ScenarioConfig config = resolve_config(config_path, preset);
        if (simulate->parsed()) {
            config.estimation_enabled = false;
            config.image_single = config.image_rank1 = config.image_kirchhoff = false;
            const auto result = isar::run_pipeline(config, seed, out_dir, stage_cache);
            std::cout << result.report.summary();
        } else if (estimate->parsed()) {
            config.estimation_enabled = true;
            config.image_single = config.image_rank1 = config.image_kirchhoff = false;
            const auto result = isar::run_pipeline(config, seed, out_dir, stage_cache);
            std::cout << result.report.summary();
        } else if (image->parsed()) {
            const auto result = isar::run_pipeline(config, seed, out_dir, stage_cache);
            std::cout << result.report.summary();
        } else if (sweep->parsed()) {
            const auto reports =
                isar::run_sweep(config, sweep_param, parse_values(sweep_values), seed, out_dir,
                                workers);
            for (std::size_t i = 0; i < reports.size(); ++i) {
                std::cout << "--- " << sweep_param << " value #" << i << "\n"
                          << reports[i].summary();
            }
        } else if (kernels->parsed()) {
            isar::write_kernel_maps(config, out_dir);
            std::cout << "kernel maps written to " << out_dir << "\n";
        }
    } catch (const isar::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
