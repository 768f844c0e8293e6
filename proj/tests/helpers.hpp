#pragma once
// Shared test machinery: relative-error helper, deterministic parameter draws
// inside the closed-form guarantee regime, the 200-point threshold sweep, and
// the uncapped heterogeneous instance generator. All draws run on the
// library's own PRNG so every suite is reproducible bit for bit.

#include <cmath>
#include <optional>
#include <vector>

#include "flpricing/core.hpp"
#include "flpricing/heterogeneous.hpp"
#include "flpricing/rng.hpp"

namespace testutil {

using namespace flpricing;

inline double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

// The section-6 experiment parameters used throughout the suites.
inline MarketParams paper_market(int T = 10) { return {0.5, 1.0, 0.5, T}; }
inline ClientType paper_client() { return {1.0, 0.5, 1.0}; }

// Five types s_i = s0 + (i-1) mu, tau_i = beta s_i, uniform shares.
inline std::vector<ClientType> disparity_types(double mu, double beta, int n = 5, double s0 = 1.0) {
    std::vector<ClientType> types;
    for (int i = 0; i < n; ++i) {
        const double s = s0 + i * mu;
        types.push_back({s, beta * s, 1.0 / n});
    }
    return types;
}

struct RegimeDraw {
    MarketParams market;
    ClientType client;
};

// A single-type market inside the guarantee regime: alpha >= 0.5, b >= 1,
// 0.5 <= r < 0.95, s/tau >= 1.
inline RegimeDraw draw_regime(SplitMix64& rng) {
    RegimeDraw draw;
    draw.market.alpha = rng.next_double(0.5, 1.0);
    draw.market.b = rng.next_double(1.0, 3.0);
    draw.market.r = rng.next_double(0.5, 0.95);
    draw.market.T = 4 + static_cast<int>(rng.next() % 27);
    draw.client.s = rng.next_double(0.5, 3.0);
    draw.client.tau = draw.client.s * rng.next_double(0.2, 1.0);
    draw.client.q = 1.0;
    return draw;
}

struct SweepPoint {
    MarketParams market;
    ClientType client;
};

// Exactly 200 deterministic points over T in {5..50}, r in {0.50,...,0.95}
// and tau in {0.3, 0.5, 1.0}, section-6 values elsewhere.
inline std::vector<SweepPoint> threshold_sweep_points() {
    SplitMix64 rng(0x7153u);
    const double taus[3] = {0.3, 0.5, 1.0};
    std::vector<SweepPoint> points;
    points.reserve(200);
    for (int k = 0; k < 200; ++k) {
        SweepPoint point;
        point.market = paper_market(5 + static_cast<int>(rng.next() % 46));
        point.market.r = 0.5 + 0.05 * static_cast<double>(rng.next() % 10);
        point.client = {1.0, taus[rng.next() % 3], 1.0};
        points.push_back(point);
    }
    return points;
}

struct HeteroInstance {
    MarketParams market;
    std::vector<ClientType> types;
};

// Random ascending type set with every nonempty subset uncapped at every
// feasible threshold, so the closed forms describe the objective exactly.
// Draws repeat until the no-cap requirement holds; fully deterministic.
inline HeteroInstance draw_uncapped_instance(SplitMix64& rng, int max_types = 5) {
    for (;;) {
        HeteroInstance instance;
        instance.market.alpha = rng.next_double(0.5, 1.0);
        instance.market.b = rng.next_double(1.0, 2.0);
        instance.market.r = rng.next_double(0.5, 0.9);
        instance.market.T = 6 + static_cast<int>(rng.next() % 9);

        const int n = 1 + static_cast<int>(rng.next() % static_cast<unsigned>(max_types));
        double s = rng.next_double(0.5, 1.5);
        double tau = s * rng.next_double(0.3, 1.0);
        std::vector<double> sizes{s}, times{tau};
        for (int i = 1; i < n; ++i) {
            s += rng.next_double(0.1, 1.0);
            tau += rng.next_double(0.05, 0.4);
            sizes.push_back(s);
            times.push_back(tau);
        }
        std::vector<double> shares;
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            shares.push_back(rng.next_double(0.2, 1.0));
            total += shares.back();
        }
        for (int i = 0; i < n; ++i)
            instance.types.push_back({sizes[static_cast<std::size_t>(i)],
                                      times[static_cast<std::size_t>(i)],
                                      shares[static_cast<std::size_t>(i)] / total});

        bool ascending = true;
        for (int i = 1; i < n; ++i)
            if (!(instance.types[i - 1].tau < instance.types[i].tau)) ascending = false;
        if (!ascending) continue;

        bool uncapped = true;
        for (unsigned mask = 1; mask < (1u << n) && uncapped; ++mask) {
            std::vector<ClientType> subset;
            for (int i = 0; i < n; ++i)
                if (mask & (1u << i)) subset.push_back(instance.types[static_cast<std::size_t>(i)]);
            for (int t_th = 1; t_th <= instance.market.T - 1 && uncapped; ++t_th)
                if (cap_flags(instance.market, subset, t_th).any()) uncapped = false;
        }
        if (uncapped) return instance;
    }
}

}  // namespace testutil
