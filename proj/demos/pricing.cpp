// Minimal library walkthrough: optimal threshold, dynamic schedule, and the
// static benchmark for one market.

#include <cstdio>

#include "flpricing/homogeneous.hpp"
#include "flpricing/simulator.hpp"

int main() {
    using namespace flpricing;

    const MarketParams market{0.5, 1.0, 0.5, 10};
    const ClientType client{1.0, 0.5, 1.0};

    const ThresholdAnalysis analysis = optimal_threshold(market, client);
    std::printf("optimal recruitment threshold: %d (total cost %.6f)\n", analysis.t_th_star,
                analysis.cost_at_star);

    const PriceSchedule schedule = price_schedule(market, client, analysis.t_th_star);
    for (std::size_t t = 0; t < schedule.slots(); ++t)
        std::printf("  slot %zu: price %.6f\n", t, schedule.at(t));

    std::printf("static benchmark price: %.6f\n",
                static_price(market, client, analysis.t_th_star));

    const ClientType types[1] = {client};
    const ReplicaConfig config{42, 20000, std::nullopt};
    const MonteCarloSummary mc =
        monte_carlo_cost(market, types, analysis.t_th_star, schedule, config);
    std::printf("Monte Carlo cost: %.6f +/- %.6f (analytic %.6f)\n", mc.mean_cost, mc.se_cost,
                analysis.cost_at_star);
    return 0;
}
