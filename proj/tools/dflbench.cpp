// dflbench: run seeded experiment sweeps, emit CSV tables and SVG plots.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dflsim/errors.hpp"
#include "dflsim/experiment.hpp"
#include "dflsim/svg_plot.hpp"

namespace {

namespace fs = std::filesystem;

void apply_seed_override(dflsim::ExperimentSpec& spec) {
    const char* env = std::getenv("DFLBENCH_SEED");
    if (env == nullptr || *env == '\0') return;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
        throw dflsim::validation_error(std::string("DFLBENCH_SEED is not an integer: ") + env);
    }
    spec.scenario.seed = v;
}

int cmd_run(const std::string& config_path, const std::string& out_override, int jobs) {
    dflsim::ExperimentSpec spec = dflsim::load_spec(config_path);
    apply_seed_override(spec);
    const std::string out_dir = out_override.empty() ? spec.output_dir : out_override;
    fs::create_directories(out_dir);

    const dflsim::ExperimentResult result = dflsim::run_experiment(spec, jobs);
    const std::string results_path = (fs::path(out_dir) / "results.csv").string();
    dflsim::emit_csv(result.rows, results_path);
    std::cout << "wrote " << results_path << " (" << result.rows.size() << " rows)\n";
    if (!result.fl_rows.empty()) {
        const std::string fl_path = (fs::path(out_dir) / "fl_loss.csv").string();
        dflsim::emit_fl_csv(result.fl_rows, fl_path);
        std::cout << "wrote " << fl_path << " (" << result.fl_rows.size() << " rows)\n";
    }
    if (!result.errors.empty()) {
        const std::string err_path = (fs::path(out_dir) / "errors.csv").string();
        dflsim::emit_errors_csv(result.errors, err_path);
        std::cerr << result.errors.size() << " cell(s) failed; see " << err_path << "\n";
        return 2;
    }
    return 0;
}

int cmd_plot(const std::string& in_path, const std::string& kind_name, const std::string& out_path) {
    const auto table = dflsim::parse_csv(in_path);
    dflsim::emit_plot(table, dflsim::plot_kind_from_string(kind_name), out_path);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_validate(const std::string& config_path) {
    dflsim::ExperimentSpec spec = dflsim::load_spec(config_path);
    apply_seed_override(spec);
    const std::size_t points = spec.sweep_values.empty() ? 1 : spec.sweep_values.size();
    std::cout << "config OK: " << spec.schemes.size() << " scheme(s), " << points
              << " sweep point(s), " << spec.num_seeds << " seed(s), base seed "
              << spec.scenario.seed << (spec.fl.has_value() ? ", training stage on" : "") << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dispersed federated learning cost-minimization benchmark"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int jobs = 1;
    auto* run = app.add_subcommand("run", "run the experiment described by a JSON config");
    run->add_option("--config", config_path, "path to the JSON config")->required();
    run->add_option("--out", out_dir, "output directory (overrides the config)");
    run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    std::string plot_in;
    std::string plot_kind;
    std::string plot_out;
    auto* plot = app.add_subcommand("plot", "render an SVG from a results CSV");
    plot->add_option("--in", plot_in, "results CSV")->required();
    plot->add_option("--kind", plot_kind, "cost_vs_iter or cost_vs_sweep")->required();
    plot->add_option("--out", plot_out, "output SVG path")->required();

    std::string validate_config;
    auto* validate = app.add_subcommand("validate", "check a config without running it");
    validate->add_option("--config", validate_config, "path to the JSON config")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, jobs);
        if (plot->parsed()) return cmd_plot(plot_in, plot_kind, plot_out);
        if (validate->parsed()) return cmd_validate(validate_config);
    } catch (const dflsim::validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
