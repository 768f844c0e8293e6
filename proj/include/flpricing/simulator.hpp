#pragma once
// Monte Carlo realization of the recruitment phase: Bernoulli arrivals,
// categorical type draws, uniform private costs, myopic acceptance, and
// multiplicative data aging applied to realized quantities. Replicas are
// independent streams derived from (seed, replica index), so results are
// bit-identical across runs, platforms, and any execution order.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "flpricing/core.hpp"
#include "flpricing/homogeneous.hpp"
#include "flpricing/rng.hpp"
#include "flpricing/robustness.hpp"

namespace flpricing {

struct ReplicaConfig {
    std::uint64_t seed{0x5eedf1a7c0ffee42ull};
    int replicas{10000};
    std::optional<NoiseModel> noise{};
};

struct SimulationTrace {
    std::vector<ClientEvent> events;       // one per recruitment slot
    std::vector<double> realized_data;     // B after aging, per slot
    double realized_payment{0.0};          // sum of accepted prices
    double final_data_size{0.0};
    CostBreakdown final_cost;              // infinite-loss sentinel when nothing was recruited
};

// One replica of the recruitment phase. Draw order per slot is fixed:
// arrival, then type, then private cost (invited types only), then the noisy
// contribution size (accepted arrivals under a noise model only).
inline SimulationTrace simulate_replica(const MarketParams& params,
                                        std::span<const ClientType> types, int t_th,
                                        const PriceSchedule& schedule, const ReplicaConfig& config,
                                        std::uint64_t replica_index) {
    const double D = iteration_count(params, t_th, detail::governing_tau(types));
    if (schedule.slots() != static_cast<std::size_t>(t_th) || schedule.num_types != types.size())
        throw std::invalid_argument("schedule shape does not match (prefix, T_th)");
    if (config.noise) detail::check_noise(types, *config.noise);

    SplitMix64 rng = replica_stream(config.seed, replica_index);
    SimulationTrace trace;
    trace.events.reserve(static_cast<std::size_t>(t_th));
    trace.realized_data.reserve(static_cast<std::size_t>(t_th));

    double data = 0.0;
    for (int slot = 0; slot < t_th; ++slot) {
        ClientEvent event;
        event.slot = slot;
        double contribution = 0.0;

        if (rng.next_double() < params.alpha) {
            event.arrived = true;
            const double type_draw = rng.next_double();
            double cumulative = 0.0;
            for (std::size_t i = 0; i < types.size(); ++i) {
                cumulative += types[i].q;
                if (type_draw < cumulative) {
                    event.type_index = static_cast<int>(i);
                    break;
                }
            }
            // An arrival beyond the invited mass belongs to a type that was
            // never offered a price; it arrives and leaves.
            if (event.type_index >= 0) {
                const ClientType& type = types[static_cast<std::size_t>(event.type_index)];
                const double cost = rng.next_double() * params.b;
                event.cost = cost;
                const double price = schedule.at(static_cast<std::size_t>(slot),
                                                 static_cast<std::size_t>(event.type_index));
                if (cost * type.tau * D <= price) {
                    event.accepted = true;
                    event.payoff = price - cost * type.tau * D;
                    trace.realized_payment += price;
                    double size = type.s;
                    if (config.noise) {
                        const double delta = config.noise->deltas[static_cast<std::size_t>(event.type_index)];
                        size += delta * (2.0 * rng.next_double() - 1.0);
                    }
                    contribution = size;
                    event.contribution = size;
                }
            }
        }

        data = params.r * (data + contribution);
        trace.realized_data.push_back(data);
        trace.events.push_back(event);
    }

    trace.final_data_size = data;
    const double loss = data > 0.0 ? 1.0 / std::sqrt(data * D)
                                   : std::numeric_limits<double>::infinity();
    trace.final_cost = CostBreakdown::assemble(trace.realized_payment, loss, 1.0 / D);
    return trace;
}

struct MonteCarloSummary {
    int replicas{0};
    double iterations{0.0};        // D for the simulated split
    double mean_cost{0.0};         // cost functional at the estimated expectations
    double se_cost{0.0};           // delta-method standard error of mean_cost
    double mean_payment{0.0};
    double se_payment{0.0};
    double mean_final_data{0.0};
    double se_final_data{0.0};
    int zero_data_replicas{0};     // replicas that recruited nothing
    std::vector<double> accept_rate;     // per-slot acceptance frequency
    std::vector<double> accept_rate_se;
};

// Sample mean and standard error of the total cost across replicas. The
// objective is a function of the 'expected' data size, so the estimate is the
// cost functional applied to the sample means: mean payment plus
// 1/sqrt(mean B * D) plus 1/D. A naive mean of per-replica totals diverges
// whenever a replica recruits nothing. The standard error linearizes the
// loss term at the sample mean (delta method), which also absorbs the
// payment/data covariance. Accumulation runs in replica-index order; the
// reduction is a plain sum, so the result is independent of scheduling.
inline MonteCarloSummary monte_carlo_cost(const MarketParams& params,
                                          std::span<const ClientType> types, int t_th,
                                          const PriceSchedule& schedule,
                                          const ReplicaConfig& config) {
    if (config.replicas < 2)
        throw std::invalid_argument("monte_carlo_cost requires at least 2 replicas");
    const double D = iteration_count(params, t_th, detail::governing_tau(types));
    const int n = config.replicas;

    double sum_pay = 0.0, sum_pay2 = 0.0;
    double sum_data = 0.0, sum_data2 = 0.0;
    double sum_cross = 0.0;
    std::vector<long> accepted(static_cast<std::size_t>(t_th), 0);
    int zero_data = 0;

    for (int k = 0; k < n; ++k) {
        const SimulationTrace trace =
            simulate_replica(params, types, t_th, schedule, config, static_cast<std::uint64_t>(k));
        sum_pay += trace.realized_payment;
        sum_pay2 += trace.realized_payment * trace.realized_payment;
        sum_data += trace.final_data_size;
        sum_data2 += trace.final_data_size * trace.final_data_size;
        sum_cross += trace.realized_payment * trace.final_data_size;
        if (!(trace.final_data_size > 0.0)) ++zero_data;
        for (int slot = 0; slot < t_th; ++slot)
            if (trace.events[static_cast<std::size_t>(slot)].accepted)
                ++accepted[static_cast<std::size_t>(slot)];
    }

    MonteCarloSummary summary;
    summary.replicas = n;
    summary.iterations = D;
    summary.zero_data_replicas = zero_data;
    summary.mean_payment = sum_pay / n;
    summary.mean_final_data = sum_data / n;

    const double var_pay = std::max(0.0, (sum_pay2 - n * summary.mean_payment * summary.mean_payment) / (n - 1));
    const double var_data = std::max(0.0, (sum_data2 - n * summary.mean_final_data * summary.mean_final_data) / (n - 1));
    const double cov = (sum_cross - n * summary.mean_payment * summary.mean_final_data) / (n - 1);
    summary.se_payment = std::sqrt(var_pay / n);
    summary.se_final_data = std::sqrt(var_data / n);

    if (summary.mean_final_data > 0.0) {
        const double loss = 1.0 / std::sqrt(summary.mean_final_data * D);
        const double slope = -0.5 / std::sqrt(D) * std::pow(summary.mean_final_data, -1.5);
        summary.mean_cost = summary.mean_payment + loss + 1.0 / D;
        const double var_cost =
            std::max(0.0, var_pay + slope * slope * var_data + 2.0 * slope * cov);
        summary.se_cost = std::sqrt(var_cost / n);
    } else {
        summary.mean_cost = std::numeric_limits<double>::infinity();
        summary.se_cost = std::numeric_limits<double>::infinity();
    }

    summary.accept_rate.resize(static_cast<std::size_t>(t_th));
    summary.accept_rate_se.resize(static_cast<std::size_t>(t_th));
    for (int slot = 0; slot < t_th; ++slot) {
        const double rate = static_cast<double>(accepted[static_cast<std::size_t>(slot)]) / n;
        summary.accept_rate[static_cast<std::size_t>(slot)] = rate;
        summary.accept_rate_se[static_cast<std::size_t>(slot)] = std::sqrt(rate * (1.0 - rate) / n);
    }
    return summary;
}

struct ComparisonRow {
    int T{0};
    int t_th_star{1};
    double dynamic_cost{0.0};   // closed-form total under the dynamic schedule
    double static_cost{0.0};    // evaluator total under the optimal flat price
    double static_price{0.0};
    double dynamic_mc{0.0};
    double dynamic_mc_se{0.0};
    double static_mc{0.0};
    double static_mc_se{0.0};
    double gap{0.0};            // static_cost - dynamic_cost
    double relative_gap{0.0};   // gap / dynamic_cost
};

// Analytic and Monte Carlo costs of the dynamic schedule and the optimal flat
// benchmark, both priced at the dynamic-optimal threshold for each horizon.
// Per-row Monte Carlo seeds are derived from (seed, T, strategy) so rows can
// be recomputed independently.
inline std::vector<ComparisonRow> compare_static_dynamic(const MarketParams& base,
                                                         const ClientType& type,
                                                         std::span<const int> horizons,
                                                         const ReplicaConfig& config) {
    if (horizons.empty())
        throw std::invalid_argument("compare_static_dynamic requires a nonempty horizon range");
    std::vector<ComparisonRow> rows;
    rows.reserve(horizons.size());
    const ClientType type_array[1] = {type};
    const std::span<const ClientType> single(type_array, 1);

    for (int T : horizons) {
        MarketParams params = base;
        params.T = T;
        const ThresholdAnalysis analysis = optimal_threshold(params, type);

        ComparisonRow row;
        row.T = T;
        row.t_th_star = analysis.t_th_star;
        row.dynamic_cost = analysis.cost_at_star;
        const PriceSchedule dynamic = price_schedule(params, type, analysis.t_th_star);
        const PriceSchedule flat = static_schedule(params, type, analysis.t_th_star);
        row.static_price = flat.at(0);
        row.static_cost = evaluate_schedule(params, analysis.t_th_star, flat, single).cost.total;
        row.gap = row.static_cost - row.dynamic_cost;
        row.relative_gap = row.gap / row.dynamic_cost;

        ReplicaConfig dynamic_config = config;
        dynamic_config.seed = mix64(config.seed ^ mix64(static_cast<std::uint64_t>(T) * 2));
        const MonteCarloSummary dyn =
            monte_carlo_cost(params, single, analysis.t_th_star, dynamic, dynamic_config);
        row.dynamic_mc = dyn.mean_cost;
        row.dynamic_mc_se = dyn.se_cost;

        ReplicaConfig static_config = config;
        static_config.seed = mix64(config.seed ^ mix64(static_cast<std::uint64_t>(T) * 2 + 1));
        const MonteCarloSummary stat =
            monte_carlo_cost(params, single, analysis.t_th_star, flat, static_config);
        row.static_mc = stat.mean_cost;
        row.static_mc_se = stat.se_cost;

        rows.push_back(row);
    }
    return rows;
}

}  // namespace flpricing
