#pragma once
// Vector dynamic pricing with per-type participation caps, recruitment
// threshold optimization under heterogeneity, and the linear-complexity
// monotone client-type selection.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "flpricing/core.hpp"
#include "flpricing/homogeneous.hpp"

namespace flpricing {

// sum_i q_i s_i^2 / tau_i over the invited prefix. Shares are the original
// population shares: an arrival of an uninvited type simply never accepts,
// so nothing is renormalized when a prefix is evaluated.
inline double type_aggregate(std::span<const ClientType> types) {
    double sum = 0.0;
    for (const ClientType& t : types) sum += t.q * t.s * t.s / t.tau;
    return sum;
}

// Shared per-unit-data price multiplier: the uncapped optimal price of type i
// at slot t is s_i * values[t]. Strictly increasing in t for r < 1, with
// consecutive ratio r^{-1}.
struct UnitPriceSchedule {
    std::vector<double> values;
    double aggregate{0.0};  // sum q_i s_i^2 / tau_i used inside each value
};

inline UnitPriceSchedule unit_price_schedule(const MarketParams& params,
                                             std::span<const ClientType> types, int t_th) {
    const double D = iteration_count(params, t_th, detail::governing_tau(types));
    const double r2 = params.r * params.r;
    const double A = type_aggregate(types);
    const double base = std::pow(params.b, 3) * D * D * std::pow(1.0 - r2, 3) /
                        (16.0 * std::pow(params.alpha, 3) * std::pow(1.0 - std::pow(r2, t_th), 3) *
                         std::pow(A, 3));
    UnitPriceSchedule schedule;
    schedule.aggregate = A;
    schedule.values.reserve(static_cast<std::size_t>(t_th));
    for (int t = 0; t < t_th; ++t)
        schedule.values.push_back(std::pow(base * std::pow(params.r, 5 * t_th - 5 * t - 6), 0.2));
    return schedule;
}

// Cap-active flags indexed (type, slot). Because the multiplier increases in
// t, each type's capped slots form a suffix.
struct CapFlags {
    std::size_t num_types{0};
    std::size_t slots{0};
    std::vector<std::uint8_t> active;

    bool at(std::size_t type, std::size_t slot) const { return active[type * slots + slot] != 0; }
    bool any() const {
        for (std::uint8_t v : active)
            if (v) return true;
        return false;
    }
};

inline CapFlags cap_flags(const MarketParams& params, std::span<const ClientType> types, int t_th) {
    const UnitPriceSchedule unit = unit_price_schedule(params, types, t_th);
    const double D = iteration_count(params, t_th, detail::governing_tau(types));
    CapFlags flags;
    flags.num_types = types.size();
    flags.slots = static_cast<std::size_t>(t_th);
    flags.active.assign(flags.num_types * flags.slots, 0);
    for (std::size_t i = 0; i < types.size(); ++i)
        for (int t = 0; t < t_th; ++t)
            if (types[i].s * unit.values[static_cast<std::size_t>(t)] > params.b * types[i].tau * D)
                flags.active[i * flags.slots + static_cast<std::size_t>(t)] = 1;
    return flags;
}

// Optimal vector schedule p_i(t) = min(s_i * unit(t), b tau_i D). A type that
// hits its cap stays capped for every later slot.
inline PriceSchedule price_vector_schedule(const MarketParams& params,
                                           std::span<const ClientType> types, int t_th) {
    const UnitPriceSchedule unit = unit_price_schedule(params, types, t_th);
    const double D = iteration_count(params, t_th, detail::governing_tau(types));
    PriceSchedule schedule = PriceSchedule::zeros(static_cast<std::size_t>(t_th), types.size());
    for (int t = 0; t < t_th; ++t) {
        for (std::size_t i = 0; i < types.size(); ++i) {
            const double uncapped = types[i].s * unit.values[static_cast<std::size_t>(t)];
            const double cap = params.b * types[i].tau * D;
            if (uncapped > cap) {
                schedule.at(static_cast<std::size_t>(t), i) = cap;
                schedule.clamped = true;
            } else {
                schedule.at(static_cast<std::size_t>(t), i) = uncapped;
            }
        }
    }
    return schedule;
}

// Closed-form total cost when no cap binds:
//   J = C (b/(alpha r^2))^{1/5} ((1-r^2)/(1-r^{2 T_th}))^{1/5} A^{-1/5}
//       (tau_N/(T-T_th))^{1/5} + tau_N/(T-T_th).
namespace detail {

// J as a formula; describes the objective only while no cap binds.
inline double closed_form_prefix_cost(const MarketParams& params, std::span<const ClientType> types,
                                      int t_th) {
    const double tau_gov = governing_tau(types);
    iteration_count(params, t_th, tau_gov);  // range check
    const double r2 = params.r * params.r;
    const double horizon = static_cast<double>(params.T - t_th);
    return kCostCoefficient * std::pow(params.b / (params.alpha * r2), 0.2) *
               std::pow((1.0 - r2) / (1.0 - std::pow(r2, t_th)), 0.2) *
               std::pow(type_aggregate(types), -0.2) * std::pow(tau_gov / horizon, 0.2) +
           tau_gov / horizon;
}

}  // namespace detail

inline double prefix_cost_uncapped(const MarketParams& params, std::span<const ClientType> types,
                                   int t_th) {
    if (cap_flags(params, types, t_th).any())
        throw std::logic_error("prefix_cost_uncapped: a participation cap is active");
    return detail::closed_form_prefix_cost(params, types, t_th);
}

// Cost of the (possibly capped) optimal vector schedule, via the evaluator.
// Coincides with prefix_cost_uncapped when no cap binds.
inline ScheduleEvaluation prefix_cost_general(const MarketParams& params,
                                              std::span<const ClientType> types, int t_th) {
    return evaluate_schedule(params, t_th, price_vector_schedule(params, types, t_th), types);
}

// Analytic cost where valid, evaluator cost where caps bind. The threshold
// scan, the subset oracle, and the selection loop all price candidates
// through this single function so argmin comparisons are exact.
inline double prefix_cost(const MarketParams& params, std::span<const ClientType> types, int t_th) {
    if (cap_flags(params, types, t_th).any())
        return prefix_cost_general(params, types, t_th).cost.total;
    return detail::closed_form_prefix_cost(params, types, t_th);
}

// Derivative of the uncapped cost in a real-valued threshold. The final term
// carries the governing iteration duration tau_N (the source equation leaves
// the subscript implicit; every other term of the objective it differentiates
// carries tau_N).
inline double stationarity_residual(const MarketParams& params, std::span<const ClientType> types,
                                    double t_th) {
    if (!(t_th >= 1.0) || !(t_th < params.T))
        throw std::domain_error("stationarity residual requires 1 <= T_th < T");
    const double tau_gov = detail::governing_tau(types);
    const double r2 = params.r * params.r;
    const double horizon = params.T - t_th;
    const double decay = std::pow(r2, t_th);
    const double scale = std::pow(type_aggregate(types), -0.2) *
                         std::pow(params.b * tau_gov * (1.0 - r2) /
                                      (params.alpha * r2 * (1.0 - decay) * horizon),
                                  0.2);
    const double bracket = 2.0 * decay * std::log(params.r) / (1.0 - decay) + 1.0 / horizon;
    return 0.2 * kCostCoefficient * scale * bracket + tau_gov / (horizon * horizon);
}

struct PrefixOptimum {
    int t_th_star{1};
    double cost{0.0};
    bool cap_constrained{false};  // exhaustive fallback ran because a cap binds
};

// Optimal threshold for a fixed invited prefix. Solves the stationarity
// equation by bisection (root below 1 clamps to 1), compares the two
// neighbouring integers on the closed form, then verifies the no-cap
// condition s_i / tau_i <= b D / unit(t) at the candidate. If any cap binds
// there, the closed form no longer describes the objective and every integer
// threshold is evaluated through the capped schedule instead.
inline PrefixOptimum optimal_threshold_for_prefix(const MarketParams& params,
                                                  std::span<const ClientType> types) {
    const double root =
        detail::bisect_increasing([&](double x) { return stationarity_residual(params, types, x); },
                                  1.0, static_cast<double>(params.T - 1));
    const int lo = std::clamp(static_cast<int>(std::floor(root)), 1, params.T - 1);
    const int hi = std::clamp(lo + 1, 1, params.T - 1);
    const double cost_lo = detail::closed_form_prefix_cost(params, types, lo);
    const double cost_hi = hi == lo ? cost_lo : detail::closed_form_prefix_cost(params, types, hi);
    const int candidate = cost_improves(cost_hi, cost_lo) ? hi : lo;

    if (!cap_flags(params, types, candidate).any())
        return {candidate, cost_improves(cost_hi, cost_lo) ? cost_hi : cost_lo, false};

    PrefixOptimum best{1, prefix_cost(params, types, 1), true};
    for (int t_th = 2; t_th <= params.T - 1; ++t_th) {
        const double cost = prefix_cost(params, types, t_th);
        if (cost_improves(cost, best.cost)) {
            best.t_th_star = t_th;
            best.cost = cost;
        }
    }
    return best;
}

struct PrefixChoice {
    int j_star{1};        // invited set is exactly {1, ..., j_star}
    int t_th_star{1};
    double cost{0.0};
    CapFlags cap_active;  // cap flags of the winning (prefix, threshold)
};

// Monotone client-type selection: the optimal invited set is always a prefix
// of the ascending type list, so a linear scan over the N prefixes replaces
// the exponential subset search. Ties go to the smaller prefix.
inline PrefixChoice select_client_types(const MarketParams& params, const ClientTypeSet& set) {
    PrefixChoice choice;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j <= set.size(); ++j) {
        const PrefixOptimum optimum = optimal_threshold_for_prefix(params, set.prefix(j));
        if (cost_improves(optimum.cost, best_cost)) {
            best_cost = optimum.cost;
            choice.j_star = static_cast<int>(j);
            choice.t_th_star = optimum.t_th_star;
            choice.cost = optimum.cost;
        }
    }
    choice.cap_active = cap_flags(params, set.prefix(static_cast<std::size_t>(choice.j_star)),
                                  choice.t_th_star);
    return choice;
}

}  // namespace flpricing
