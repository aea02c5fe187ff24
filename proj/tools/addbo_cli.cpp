// Benchmark driver: run replicated BO experiments, summarize CSV results and
// export 2-D posterior surfaces.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "addbo/bench.hpp"
#include "addbo/errors.hpp"

namespace {

using namespace addbo;

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot open '" + path + "' for writing");
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian optimization with additive Gaussian processes"};
    app.require_subcommand(1);

    // run ---------------------------------------------------------------
    auto* run = app.add_subcommand("run", "Run a replicated BO experiment and write one CSV row per evaluation");
    std::string config_path;
    std::string function_name = "ackley";
    std::string method_name = "ts";
    std::string model_log;
    ExperimentConfig cfg;
    run->add_option("--config", config_path, "JSON file with ExperimentConfig fields; flags override it");
    run->add_option("--function", function_name, "ackley | levy | rastrigin");
    run->add_option("--dim", cfg.dim, "Input dimension P");
    run->add_option("--method", method_name, "ts | ats | alcb");
    run->add_option("--batch-size", cfg.batch_size, "Points per acquisition round");
    run->add_option("--init", cfg.init_count, "Initial uniform design size");
    run->add_option("--acquisitions", cfg.total_acquisitions, "Total points acquired after the initial design");
    run->add_option("--candidates", cfg.candidate_count, "Uniform candidate points per round");
    run->add_option("--refit-every", cfg.refit_every, "Acquisitions between hyperparameter refits");
    run->add_option("--max-group-dim", cfg.max_group_dim, "Largest group in sampled additive structures");
    run->add_option("--reps", cfg.replicates, "Number of replicates");
    run->add_option("--seed", cfg.base_seed, "Base seed");
    run->add_option("--beta", cfg.beta, "LCB standard deviation multiplier (alcb)");
    run->add_option("--fit-steps", cfg.fit_steps, "Adam iterations per refit");
    run->add_option("--fit-step-size", cfg.fit_step_size, "Adam step size");
    run->add_option("--threads", cfg.threads, "Replicates run concurrently");
    run->add_flag("--no-timing{false}", cfg.record_timing, "Write round_seconds as 0 for byte-reproducible output");
    run->add_option("--out", cfg.output, "Output CSV path (stdout when empty)");
    run->add_option("--model-log", model_log, "Write fitted models as JSON lines");

    // summarize ---------------------------------------------------------
    auto* sum = app.add_subcommand("summarize", "Median/quartile BOV trajectories and final log10 optimality gaps");
    std::vector<std::string> inputs;
    std::string sum_out;
    std::string sum_function;
    Index sum_dim = 0;
    std::optional<double> sum_optimum;
    sum->add_option("inputs", inputs, "CSV files written by 'run'")->required()->check(CLI::ExistingFile);
    sum->add_option("--function", sum_function, "Function kind, to derive the known optimum");
    sum->add_option("--dim", sum_dim, "Dimension, to derive the known optimum");
    sum->add_option("--optimum", sum_optimum, "Known optimum value");
    sum->add_option("--out", sum_out, "Trajectory CSV path (stdout when empty)");

    // surface -----------------------------------------------------------
    auto* surf = app.add_subcommand("surface", "Exact vs additive posterior surface on a 2-D additive function");
    std::string surf_function = "ackley";
    Index surf_init = 20;
    Index resolution = 40;
    std::uint64_t surf_seed = 0;
    int surf_fit_steps = 1000;
    double surf_step_size = 1e-4;
    std::string surf_out;
    surf->add_option("--function", surf_function, "ackley | levy | rastrigin");
    surf->add_option("--init", surf_init, "Number of training points");
    surf->add_option("--resolution", resolution, "Grid points per axis");
    surf->add_option("--seed", surf_seed, "Seed");
    surf->add_option("--fit-steps", surf_fit_steps, "Adam iterations");
    surf->add_option("--fit-step-size", surf_step_size, "Adam step size");
    surf->add_option("--out", surf_out, "Output CSV path (stdout when empty)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            ExperimentConfig config = cfg;
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                if (!in) throw ConfigError("cannot open '" + config_path + "'");
                config = config_from_json(nlohmann::json::parse(in));
            }
            // Explicit flags win over the file.
            if (run->count("--function") || config_path.empty()) config.function = parse_function_kind(function_name);
            if (run->count("--method") || config_path.empty()) config.method = parse_method(method_name);
            if (!config_path.empty()) {
                auto overlay = [&](const char* flag, auto& field, const auto& value) {
                    if (run->count(flag)) field = value;
                };
                overlay("--dim", config.dim, cfg.dim);
                overlay("--batch-size", config.batch_size, cfg.batch_size);
                overlay("--init", config.init_count, cfg.init_count);
                overlay("--acquisitions", config.total_acquisitions, cfg.total_acquisitions);
                overlay("--candidates", config.candidate_count, cfg.candidate_count);
                overlay("--refit-every", config.refit_every, cfg.refit_every);
                overlay("--max-group-dim", config.max_group_dim, cfg.max_group_dim);
                overlay("--reps", config.replicates, cfg.replicates);
                overlay("--seed", config.base_seed, cfg.base_seed);
                overlay("--beta", config.beta, cfg.beta);
                overlay("--fit-steps", config.fit_steps, cfg.fit_steps);
                overlay("--fit-step-size", config.fit_step_size, cfg.fit_step_size);
                overlay("--threads", config.threads, cfg.threads);
                overlay("--no-timing", config.record_timing, cfg.record_timing);
                overlay("--out", config.output, cfg.output);
            }
            config.validate();

            std::vector<nlohmann::json> models;
            const auto records = run_experiment(config, model_log.empty() ? nullptr : &models);
            if (config.output.empty()) {
                write_csv(std::cout, records, config.dim);
            } else {
                auto out = open_output(config.output);
                write_csv(out, records, config.dim);
            }
            if (!model_log.empty()) {
                auto out = open_output(model_log);
                for (const auto& m : models) {
                    out << m.dump() << '\n';
                }
            }
        } else if (*sum) {
            std::vector<RunRecord> records;
            for (const auto& path : inputs) {
                std::ifstream in(path);
                auto part = read_csv(in);
                records.insert(records.end(), part.begin(), part.end());
            }
            std::optional<double> optimum = sum_optimum;
            if (!optimum && !sum_function.empty()) {
                if (sum_dim < 1) throw ConfigError("--function requires --dim");
                optimum = known_optimum(parse_function_kind(sum_function), sum_dim);
            }
            const auto summaries = summarize(records, optimum);
            if (sum_out.empty()) {
                write_summary_csv(std::cout, summaries);
            } else {
                auto out = open_output(sum_out);
                write_summary_csv(out, summaries);
            }
            for (const auto& s : summaries) {
                if (s.final_gap) {
                    std::cerr << s.method << ": final log10 gap median " << s.final_gap->median << " [q25 "
                              << s.final_gap->q25 << ", q75 " << s.final_gap->q75 << "] over "
                              << s.final_gap->log10_gaps.size() << " replicates\n";
                }
            }
        } else if (*surf) {
            const FunctionKind kind = parse_function_kind(surf_function);
            const RngStream root(surf_seed);
            RngStream fn_stream = root.split(0);
            const SyntheticFunction objective = make_function(kind, 2, fn_stream);
            RngStream design_stream = root.split(1);
            const Matrix x = candidate_grid(2, surf_init, design_stream);
            const Dataset data(x, objective.evaluate(x));
            FitOptions options;
            options.steps = surf_fit_steps;
            options.step_size = surf_step_size;
            const AdditiveGpModel model =
                fit(AdditiveGpModel::with_defaults(AdditiveStructure::singletons(2), data), data, options).model;
            RngStream draw_stream = root.split(2);
            const auto rows = export_surface(model, data, resolution, draw_stream);
            if (surf_out.empty()) {
                write_surface_csv(std::cout, rows);
            } else {
                auto out = open_output(surf_out);
                write_surface_csv(out, rows);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
