#pragma once
// Experiment configuration, the INI-style config/manifest format, CSV table
// rendering, and the job runner behind the command-line tool. Everything is
// deterministic: identical config and seed produce byte-identical tables.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "flpricing/core.hpp"
#include "flpricing/heterogeneous.hpp"
#include "flpricing/homogeneous.hpp"
#include "flpricing/oracle.hpp"
#include "flpricing/robustness.hpp"
#include "flpricing/simulator.hpp"

namespace flpricing {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Job { Price, Threshold, SelectTypes, Simulate, Compare, Robustness };

inline const char* job_name(Job job) {
    switch (job) {
        case Job::Price: return "price";
        case Job::Threshold: return "threshold";
        case Job::SelectTypes: return "select-types";
        case Job::Simulate: return "simulate";
        case Job::Compare: return "compare";
        case Job::Robustness: return "robustness";
    }
    return "price";
}

inline Job job_from_name(const std::string& name) {
    for (Job job : {Job::Price, Job::Threshold, Job::SelectTypes, Job::Simulate, Job::Compare,
                    Job::Robustness})
        if (name == job_name(job)) return job;
    throw ConfigError("unknown job: " + name);
}

struct SweepSpec {
    std::string axis;            // one of T, r, mu, beta, delta
    std::vector<double> values;
};

struct ExperimentConfig {
    Job job{Job::Price};
    MarketParams market{};
    int num_types{1};
    double s0{1.0};
    double mu{1.0};
    double beta{0.5};                        // tau_i = beta * s_i; default gives tau = 0.5 at N = 1
    std::vector<ClientType> explicit_types;  // overrides the generator when nonempty
    int t_th{0};                             // 0 = use the optimal threshold
    std::uint64_t seed{0x5eedf1a7c0ffee42ull};
    int replicas{10000};
    double delta{0.0};                       // noise half-width as a fraction of each s_i
    std::optional<SweepSpec> sweep{};
    std::string output_path{};               // empty = "<job>.csv"

    std::vector<ClientType> resolve_types() const {
        if (!explicit_types.empty()) return explicit_types;
        if (num_types < 1) throw ConfigError("type count must be at least 1");
        std::vector<ClientType> types;
        types.reserve(static_cast<std::size_t>(num_types));
        for (int i = 0; i < num_types; ++i) {
            const double s = s0 + i * mu;
            types.push_back({s, beta * s, 1.0 / num_types});
        }
        return types;
    }

    std::string resolved_output_path() const {
        return output_path.empty() ? std::string(job_name(job)) + ".csv" : output_path;
    }
};

// ---------------------------------------------------------------------------
// Formatting

namespace detail {

// Nine significant digits for table cells; seventeen (exact round-trip) for
// manifest values that are parsed back.
inline std::string format_double(double v, int significant = 9) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant, v);
    return buf;
}

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string token;
    std::istringstream stream(s);
    while (std::getline(stream, token, sep)) out.push_back(trim(token));
    return out;
}

inline double parse_double(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for '" + key + "': " + value);
    }
}

inline long long parse_int(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for '" + key + "': " + value);
    }
}

}  // namespace detail

// Sweep value lists accept explicit entries and "a..b" / "a..b:step" ranges,
// e.g. "5..50" or "0.5..0.95:0.05".
inline std::vector<double> parse_sweep_values(const std::string& text) {
    std::vector<double> values;
    for (const std::string& token : detail::split(text, ',')) {
        if (token.empty()) continue;
        const auto range_pos = token.find("..");
        if (range_pos == std::string::npos) {
            values.push_back(detail::parse_double(token, "sweep values"));
            continue;
        }
        const double from = detail::parse_double(token.substr(0, range_pos), "sweep range start");
        std::string rest = token.substr(range_pos + 2);
        double step = 1.0;
        if (const auto step_pos = rest.find(':'); step_pos != std::string::npos) {
            step = detail::parse_double(rest.substr(step_pos + 1), "sweep range step");
            rest = rest.substr(0, step_pos);
        }
        const double to = detail::parse_double(rest, "sweep range end");
        if (!(step > 0.0) || to < from) throw ConfigError("bad sweep range: " + token);
        for (double v = from; v <= to + 1e-9 * step; v += step) values.push_back(v);
    }
    if (values.empty()) throw ConfigError("sweep values list is empty");
    return values;
}

// ---------------------------------------------------------------------------
// Config file (INI-style: top-level keys plus [market]/[types]/[run]/[sweep])

inline void apply_config_text(ExperimentConfig& config, std::istream& in) {
    std::string line;
    std::string section;
    std::vector<ClientType> file_types;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        std::string text = detail::trim(line);
        if (const auto hash = text.find('#'); hash != std::string::npos)
            text = detail::trim(text.substr(0, hash));
        if (text.empty()) continue;
        if (text.front() == '[') {
            if (text.back() != ']')
                throw ConfigError("line " + std::to_string(line_number) + ": unterminated section");
            section = detail::trim(text.substr(1, text.size() - 2));
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_number) + ": expected key = value");
        const std::string key = detail::trim(text.substr(0, eq));
        const std::string value = detail::trim(text.substr(eq + 1));

        if (section.empty()) {
            if (key == "job") config.job = job_from_name(value);
            else if (key == "seed") config.seed = static_cast<std::uint64_t>(
                         std::stoull(value));
            else if (key == "replicas") config.replicas = static_cast<int>(detail::parse_int(value, key));
            else if (key == "out") config.output_path = value;
            else throw ConfigError("unknown top-level key: " + key);
        } else if (section == "market") {
            if (key == "alpha") config.market.alpha = detail::parse_double(value, key);
            else if (key == "b") config.market.b = detail::parse_double(value, key);
            else if (key == "r") config.market.r = detail::parse_double(value, key);
            else if (key == "T") config.market.T = static_cast<int>(detail::parse_int(value, key));
            else throw ConfigError("unknown [market] key: " + key);
        } else if (section == "types") {
            if (key == "count") config.num_types = static_cast<int>(detail::parse_int(value, key));
            else if (key == "s0") config.s0 = detail::parse_double(value, key);
            else if (key == "mu") config.mu = detail::parse_double(value, key);
            else if (key == "beta") config.beta = detail::parse_double(value, key);
            else if (key == "type") {
                const auto fields = detail::split(value, ':');
                if (fields.size() != 3)
                    throw ConfigError("type rows take the form s:tau:q, got: " + value);
                file_types.push_back({detail::parse_double(fields[0], "type s"),
                                      detail::parse_double(fields[1], "type tau"),
                                      detail::parse_double(fields[2], "type q")});
            } else throw ConfigError("unknown [types] key: " + key);
        } else if (section == "run") {
            if (key == "Tth") config.t_th = static_cast<int>(detail::parse_int(value, key));
            else if (key == "delta") config.delta = detail::parse_double(value, key);
            else throw ConfigError("unknown [run] key: " + key);
        } else if (section == "sweep") {
            if (!config.sweep) config.sweep.emplace();
            if (key == "axis") config.sweep->axis = value;
            else if (key == "values") config.sweep->values = parse_sweep_values(value);
            else throw ConfigError("unknown [sweep] key: " + key);
        } else {
            throw ConfigError("unknown section: [" + section + "]");
        }
    }
    if (!file_types.empty()) config.explicit_types = std::move(file_types);
    if (config.sweep && (config.sweep->axis.empty() || config.sweep->values.empty()))
        throw ConfigError("[sweep] requires both axis and values");
}

inline void apply_config_file(ExperimentConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    apply_config_text(config, in);
}

// Manifest: a complete config file echoing every resolved parameter, written
// beside the table. Feeding it back reproduces the run bit for bit.
inline std::string render_manifest(const ExperimentConfig& config) {
    std::ostringstream out;
    auto d = [](double v) { return detail::format_double(v, 17); };
    out << "job = " << job_name(config.job) << "\n";
    out << "seed = " << config.seed << "\n";
    out << "replicas = " << config.replicas << "\n";
    out << "out = " << config.resolved_output_path() << "\n";
    out << "\n[market]\n";
    out << "alpha = " << d(config.market.alpha) << "\n";
    out << "b = " << d(config.market.b) << "\n";
    out << "r = " << d(config.market.r) << "\n";
    out << "T = " << config.market.T << "\n";
    out << "\n[types]\n";
    if (config.explicit_types.empty()) {
        out << "count = " << config.num_types << "\n";
        out << "s0 = " << d(config.s0) << "\n";
        out << "mu = " << d(config.mu) << "\n";
        out << "beta = " << d(config.beta) << "\n";
    } else {
        for (const ClientType& t : config.explicit_types)
            out << "type = " << d(t.s) << ":" << d(t.tau) << ":" << d(t.q) << "\n";
    }
    out << "\n[run]\n";
    out << "Tth = " << config.t_th << "\n";
    out << "delta = " << d(config.delta) << "\n";
    if (config.sweep) {
        out << "\n[sweep]\n";
        out << "axis = " << config.sweep->axis << "\n";
        out << "values = ";
        for (std::size_t i = 0; i < config.sweep->values.size(); ++i) {
            if (i) out << ",";
            out << d(config.sweep->values[i]);
        }
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Table rendering

namespace detail {

class Table {
public:
    explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> cells) {
        if (cells.size() != header_.size())
            throw std::logic_error("table row width does not match header");
        rows_.push_back(std::move(cells));
    }

    std::string render() const {
        std::ostringstream out;
        for (std::size_t i = 0; i < header_.size(); ++i) {
            if (i) out << ",";
            out << header_[i];
        }
        out << "\n";
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out << ",";
                out << row[i];
            }
            out << "\n";
        }
        return out.str();
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

inline std::string cell(double v) { return format_double(v); }
inline std::string cell(int v) { return std::to_string(v); }
inline std::string cell(std::uint64_t v) { return std::to_string(v); }

// Applies one sweep value to a copy of the config. T must be integral.
inline ExperimentConfig with_axis_value(const ExperimentConfig& base, const std::string& axis,
                                        double value) {
    ExperimentConfig config = base;
    if (axis == "T") {
        const int T = static_cast<int>(value + 0.5);
        if (std::abs(value - T) > 1e-9) throw ConfigError("sweep over T needs integer values");
        config.market.T = T;
    } else if (axis == "r") {
        config.market.r = value;
    } else if (axis == "mu") {
        if (!base.explicit_types.empty())
            throw ConfigError("sweep over mu conflicts with explicit type rows");
        config.mu = value;
    } else if (axis == "beta") {
        if (!base.explicit_types.empty())
            throw ConfigError("sweep over beta conflicts with explicit type rows");
        config.beta = value;
    } else if (axis == "delta") {
        config.delta = value;
    } else {
        throw ConfigError("unknown sweep axis: " + axis + " (expected T, r, mu, beta, delta)");
    }
    return config;
}

inline void require_valid(const ExperimentConfig& config, const std::vector<ClientType>& types) {
    const ValidationReport report = validate_params(config.market, types);
    if (!report.ok()) {
        std::string message = "invalid parameters:";
        for (const std::string& e : report.errors) message += " " + e + ";";
        throw ValidationError(message);
    }
}

inline int resolve_threshold(const ExperimentConfig& config, const MarketParams& params,
                             std::span<const ClientType> types) {
    if (config.t_th != 0) {
        if (config.t_th < 1 || config.t_th > params.T - 1)
            throw ValidationError("Tth must lie in [1, T-1]");
        return config.t_th;
    }
    return optimal_threshold_for_prefix(params, types).t_th_star;
}

}  // namespace detail

struct RunResult {
    std::string table;
    std::string manifest;
};

// Renders the job's table without touching the filesystem.
inline RunResult execute(const ExperimentConfig& config) {
    std::vector<ExperimentConfig> points;
    if (config.sweep) {
        for (double v : config.sweep->values)
            points.push_back(detail::with_axis_value(config, config.sweep->axis, v));
    } else {
        points.push_back(config);
    }

    using detail::cell;
    std::optional<detail::Table> table;

    for (const ExperimentConfig& point : points) {
        const std::vector<ClientType> raw_types = point.resolve_types();
        detail::require_valid(point, raw_types);
        const ClientTypeSet set = ClientTypeSet::create(raw_types);
        const MarketParams& params = point.market;

        switch (config.job) {
            case Job::Price: {
                if (!table)
                    table.emplace(std::vector<std::string>{"seed", "T", "alpha", "b", "r", "T_th",
                                                           "slot", "type", "price"});
                const int t_th = detail::resolve_threshold(point, params, set.all());
                const PriceSchedule schedule = price_vector_schedule(params, set.all(), t_th);
                for (int t = 0; t < t_th; ++t)
                    for (std::size_t i = 0; i < set.size(); ++i)
                        table->add_row({cell(point.seed), cell(params.T), cell(params.alpha),
                                        cell(params.b), cell(params.r), cell(t_th), cell(t),
                                        cell(static_cast<int>(i) + 1),
                                        cell(schedule.at(static_cast<std::size_t>(t), i))});
                break;
            }
            case Job::Threshold: {
                if (set.size() != 1)
                    throw ValidationError("threshold job requires a single client type");
                if (!table)
                    table.emplace(std::vector<std::string>{"seed", "T", "alpha", "b", "r", "s",
                                                           "tau", "cutoff", "regime", "T_th_real",
                                                           "T_th_star", "total_cost"});
                const ThresholdAnalysis analysis = optimal_threshold(params, set[0]);
                table->add_row(
                    {cell(point.seed), cell(params.T), cell(params.alpha), cell(params.b),
                     cell(params.r), cell(set[0].s), cell(set[0].tau), cell(analysis.cutoff),
                     analysis.regime == ThresholdRegime::HighTrainingTime ? "high" : "low",
                     analysis.t_th_real ? cell(*analysis.t_th_real) : std::string(),
                     cell(analysis.t_th_star), cell(analysis.cost_at_star)});
                break;
            }
            case Job::SelectTypes: {
                if (!table)
                    table.emplace(std::vector<std::string>{"seed", "T", "alpha", "b", "r", "N",
                                                           "s0", "mu", "beta", "j_star",
                                                           "T_th_star", "cost"});
                const PrefixChoice choice = select_client_types(params, set);
                table->add_row({cell(point.seed), cell(params.T), cell(params.alpha),
                                cell(params.b), cell(params.r),
                                cell(static_cast<int>(set.size())), cell(point.s0), cell(point.mu),
                                cell(point.beta), cell(choice.j_star), cell(choice.t_th_star),
                                cell(choice.cost)});
                break;
            }
            case Job::Simulate: {
                if (!table)
                    table.emplace(std::vector<std::string>{
                        "seed", "T", "T_th", "replicas", "delta", "mean_cost", "se_cost",
                        "mean_payment", "se_payment", "mean_final_data", "se_final_data",
                        "zero_data_replicas", "analytic_cost", "analytic_final_data"});
                const int t_th = detail::resolve_threshold(point, params, set.all());
                const PriceSchedule schedule = price_vector_schedule(params, set.all(), t_th);
                ReplicaConfig replica_config{point.seed, point.replicas, std::nullopt};
                if (point.delta > 0.0)
                    replica_config.noise = NoiseModel::fraction_of_size(set.all(), point.delta);
                const MonteCarloSummary mc =
                    monte_carlo_cost(params, set.all(), t_th, schedule, replica_config);
                const ScheduleEvaluation analytic = prefix_cost_general(params, set.all(), t_th);
                table->add_row({cell(point.seed), cell(params.T), cell(t_th),
                                cell(point.replicas), cell(point.delta), cell(mc.mean_cost),
                                cell(mc.se_cost), cell(mc.mean_payment), cell(mc.se_payment),
                                cell(mc.mean_final_data), cell(mc.se_final_data),
                                cell(mc.zero_data_replicas), cell(analytic.cost.total),
                                cell(analytic.final_data_size)});
                break;
            }
            case Job::Compare: {
                if (set.size() != 1)
                    throw ValidationError("compare job requires a single client type");
                if (!table)
                    table.emplace(std::vector<std::string>{
                        "seed", "T", "T_th", "dynamic_cost", "static_cost", "static_price",
                        "dynamic_mc", "dynamic_mc_se", "static_mc", "static_mc_se", "gap",
                        "relative_gap"});
                const int horizon[1] = {params.T};
                const ReplicaConfig replica_config{point.seed, point.replicas, std::nullopt};
                const ComparisonRow row =
                    compare_static_dynamic(params, set[0], horizon, replica_config).front();
                table->add_row({cell(point.seed), cell(row.T), cell(row.t_th_star),
                                cell(row.dynamic_cost), cell(row.static_cost),
                                cell(row.static_price), cell(row.dynamic_mc),
                                cell(row.dynamic_mc_se), cell(row.static_mc),
                                cell(row.static_mc_se), cell(row.gap), cell(row.relative_gap)});
                break;
            }
            case Job::Robustness: {
                if (!table)
                    table.emplace(std::vector<std::string>{
                        "seed", "T", "T_th", "delta", "nominal_cost", "worst_case_cost", "penalty",
                        "mc_mean", "mc_se"});
                const int t_th = detail::resolve_threshold(point, params, set.all());
                const NoiseModel noise = NoiseModel::fraction_of_size(set.all(), point.delta);
                const double nominal = prefix_cost_uncapped(params, set.all(), t_th);
                const double worst = worst_case_cost(params, set.all(), t_th, noise);
                const double penalty = worst_case_penalty(params, set.all(), t_th, noise);
                const PriceSchedule schedule = price_vector_schedule(params, set.all(), t_th);
                const ReplicaConfig replica_config{point.seed, point.replicas,
                                                   point.delta > 0.0 ? std::optional(noise)
                                                                     : std::nullopt};
                const MonteCarloSummary mc =
                    monte_carlo_cost(params, set.all(), t_th, schedule, replica_config);
                table->add_row({cell(point.seed), cell(params.T), cell(t_th), cell(point.delta),
                                cell(nominal), cell(worst), cell(penalty), cell(mc.mean_cost),
                                cell(mc.se_cost)});
                break;
            }
        }
    }

    return {table->render(), render_manifest(config)};
}

// Runs the job and writes the table plus its manifest. Exit status: 0 on
// success, 2 for config errors, 3 for validation errors, 4 for anything else.
inline int run_experiment(const ExperimentConfig& config, std::ostream* diagnostics = nullptr) {
    try {
        const RunResult result = execute(config);
        const std::string table_path = config.resolved_output_path();
        std::ofstream table(table_path, std::ios::binary);
        if (!table) throw ConfigError("cannot write output file: " + table_path);
        table << result.table;
        std::ofstream manifest(table_path + ".manifest", std::ios::binary);
        if (!manifest) throw ConfigError("cannot write manifest beside: " + table_path);
        manifest << result.manifest;
        return 0;
    } catch (const ConfigError& e) {
        if (diagnostics) *diagnostics << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        if (diagnostics) *diagnostics << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        if (diagnostics) *diagnostics << "internal error: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace flpricing
