// Command-line front end: one subcommand per job, a shared option set, and
// config-file support where command-line flags win over file values.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "flpricing/experiment.hpp"

namespace {

struct Options {
    std::string config_path;
    std::optional<double> alpha, b, r, s0, mu, beta, delta;
    std::optional<int> T, t_th, num_types, replicas;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out, sweep_axis, sweep_values;
};

void add_common_options(CLI::App* cmd, Options& opt) {
    cmd->add_option("--config", opt.config_path, "Config file (INI-style); flags override");
    cmd->add_option("--T", opt.T, "Total horizon in slots");
    cmd->add_option("--r", opt.r, "Data-aging discount factor");
    cmd->add_option("--alpha", opt.alpha, "Arrival rate per slot");
    cmd->add_option("--b", opt.b, "Private cost upper bound");
    cmd->add_option("--N", opt.num_types, "Number of generated client types");
    cmd->add_option("--s0", opt.s0, "Base data size of the generated types");
    cmd->add_option("--mu", opt.mu, "Data-size disparity between neighbouring types");
    cmd->add_option("--beta", opt.beta, "Training time per unit data (tau_i = beta * s_i)");
    cmd->add_option("--delta", opt.delta, "Noise half-width as a fraction of each s_i");
    cmd->add_option("--Tth", opt.t_th, "Recruitment threshold (0 = optimal)");
    cmd->add_option("--seed", opt.seed, "Simulation seed");
    cmd->add_option("--replicas", opt.replicas, "Monte Carlo replica count");
    cmd->add_option("--out", opt.out, "Output table path (manifest written beside it)");
    cmd->add_option("--sweep", opt.sweep_axis, "Sweep axis: T, r, mu, beta or delta");
    cmd->add_option("--sweep-values", opt.sweep_values,
                    "Sweep values, e.g. '5..50' or '0.5,0.6,0.7'");
}

int run_job(flpricing::Job job, const Options& opt) {
    flpricing::ExperimentConfig config;
    config.job = job;
    try {
        if (!opt.config_path.empty()) {
            flpricing::apply_config_file(config, opt.config_path);
            if (config.job != job)
                throw flpricing::ConfigError(std::string("config file names job '") +
                                             flpricing::job_name(config.job) +
                                             "' but the subcommand is '" +
                                             flpricing::job_name(job) + "'");
        }
        if (opt.alpha) config.market.alpha = *opt.alpha;
        if (opt.b) config.market.b = *opt.b;
        if (opt.r) config.market.r = *opt.r;
        if (opt.T) config.market.T = *opt.T;
        if (opt.num_types) {
            config.num_types = *opt.num_types;
            config.explicit_types.clear();
        }
        if (opt.s0) config.s0 = *opt.s0;
        if (opt.mu) {
            config.mu = *opt.mu;
            config.explicit_types.clear();
        }
        if (opt.beta) {
            config.beta = *opt.beta;
            config.explicit_types.clear();
        }
        if (opt.delta) config.delta = *opt.delta;
        if (opt.t_th) config.t_th = *opt.t_th;
        if (opt.seed) config.seed = *opt.seed;
        if (opt.replicas) config.replicas = *opt.replicas;
        if (opt.out) config.output_path = *opt.out;
        if (opt.sweep_axis || opt.sweep_values) {
            if (!config.sweep) config.sweep.emplace();
            if (opt.sweep_axis) config.sweep->axis = *opt.sweep_axis;
            if (opt.sweep_values) config.sweep->values = flpricing::parse_sweep_values(*opt.sweep_values);
            if (config.sweep->axis.empty() || config.sweep->values.empty())
                throw flpricing::ConfigError("--sweep and --sweep-values must be given together");
        }
    } catch (const flpricing::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    const int status = flpricing::run_experiment(config, &std::cerr);
    if (status == 0)
        std::cout << config.resolved_output_path() << "\n";
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic price schedules, recruitment thresholds and client-type selection "
                 "for federated-learning client recruitment"};
    app.require_subcommand(1);

    struct JobCommand {
        flpricing::Job job;
        const char* description;
    };
    const JobCommand commands[] = {
        {flpricing::Job::Price, "Per-slot (per-type) optimal dynamic prices"},
        {flpricing::Job::Threshold, "Optimal recruitment threshold analysis"},
        {flpricing::Job::SelectTypes, "Monotone client-type selection"},
        {flpricing::Job::Simulate, "Monte Carlo simulation of the recruitment phase"},
        {flpricing::Job::Compare, "Dynamic schedule versus optimal static price"},
        {flpricing::Job::Robustness, "Sensitivity to noisy per-arrival data sizes"},
    };

    Options options[std::size(commands)];
    CLI::App* apps[std::size(commands)];
    for (std::size_t i = 0; i < std::size(commands); ++i) {
        apps[i] = app.add_subcommand(flpricing::job_name(commands[i].job),
                                     commands[i].description);
        add_common_options(apps[i], options[i]);
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < std::size(commands); ++i)
        if (apps[i]->parsed()) return run_job(commands[i].job, options[i]);
    return 2;
}
