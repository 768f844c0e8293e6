// Client-type selection across a data-size disparity sweep: larger disparity
// drags the synchronous iteration time up, so high types get dropped.

#include <cstdio>
#include <vector>

#include "flpricing/heterogeneous.hpp"

int main() {
    using namespace flpricing;

    const MarketParams market{0.5, 1.0, 0.5, 10};
    const double beta = 0.05;  // training time per unit data

    for (double mu = 1.0; mu <= 5.0; mu += 1.0) {
        std::vector<ClientType> types;
        for (int i = 0; i < 5; ++i) {
            const double s = 1.0 + i * mu;
            types.push_back({s, beta * s, 0.2});
        }
        const PrefixChoice choice = select_client_types(market, ClientTypeSet::create(types));
        std::printf("mu = %.1f: invite types 1..%d, T_th* = %d, cost %.6f\n", mu, choice.j_star,
                    choice.t_th_star, choice.cost);
    }
    return 0;
}
