#pragma once
// Closed-form dynamic pricing, final expected data size, total expected cost,
// and the optimal recruitment threshold for a single client type, plus the
// flat-price benchmark the dynamic schedule is compared against.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "flpricing/core.hpp"

namespace flpricing {

namespace detail {

// sum_{i=1..n} r^{2(i-1)} = (1 - r^{2n}) / (1 - r^2)
inline double geometric_sum_r2(double r, int n) {
    const double r2 = r * r;
    return (1.0 - std::pow(r2, n)) / (1.0 - r2);
}

}  // namespace detail

// Per-slot price of the cost-minimizing dynamic schedule,
//   p(t) = (b^3 tau^3 D^2 r^{5 T_th - 5t - 6} (1-r^2)^3
//           / (16 alpha^3 s (1-r^{2 T_th})^3))^{1/5},
// strictly increasing in t for r < 1. Entries are clamped at b (T - T_th);
// inside the guarantee regime (alpha >= 0.5, b >= 1, s/tau >= 1, r >= 0.5)
// the clamp is provably inactive, and `clamped` flags when it fired.
inline PriceSchedule price_schedule(const MarketParams& params, const ClientType& type, int t_th) {
    const double D = iteration_count(params, t_th, type.tau);
    const double cap = params.b * (params.T - t_th);
    const double r2 = params.r * params.r;
    const double base = std::pow(params.b * type.tau, 3) * D * D * std::pow(1.0 - r2, 3) /
                        (16.0 * std::pow(params.alpha, 3) * type.s * std::pow(1.0 - std::pow(r2, t_th), 3));
    PriceSchedule schedule = PriceSchedule::zeros(static_cast<std::size_t>(t_th), 1);
    for (int t = 0; t < t_th; ++t) {
        const double price = std::pow(base * std::pow(params.r, 5 * t_th - 5 * t - 6), 0.2);
        if (price > cap) {
            schedule.at(t) = cap;
            schedule.clamped = true;
        } else {
            schedule.at(t) = price;
        }
    }
    return schedule;
}

// Expected data size at the end of the recruitment phase under the optimal
// dynamic schedule: B(T_th) = D^{-3/5} (alpha s^2 r^2 / (4 b tau) * G)^{2/5}
// with G the T_th-term geometric sum in r^2.
inline double final_data_size(const MarketParams& params, const ClientType& type, int t_th) {
    const double D = iteration_count(params, t_th, type.tau);
    const double G = detail::geometric_sum_r2(params.r, t_th);
    const double inner = params.alpha * type.s * type.s * params.r * params.r * G /
                         (4.0 * params.b * type.tau);
    return std::pow(D, -0.6) * std::pow(inner, 0.4);
}

// Total expected cost U(T) under the optimal dynamic schedule. Equals
// evaluate_schedule on that schedule up to floating-point grouping.
inline double total_cost(const MarketParams& params, const ClientType& type, int t_th) {
    iteration_count(params, t_th, type.tau);  // range check
    const double r2 = params.r * params.r;
    const double horizon = static_cast<double>(params.T - t_th);
    return kCostCoefficient *
               std::pow(params.b * type.tau / (params.alpha * type.s * type.s * r2), 0.2) *
               std::pow((1.0 - r2) / (1.0 - std::pow(r2, t_th)), 0.2) *
               std::pow(type.tau / horizon, 0.2) +
           type.tau / horizon;
}

// Derivative of U(T) with respect to a real-valued threshold; strictly
// increasing on [1, T), so its root brackets the continuous optimum.
inline double stationarity_residual(const MarketParams& params, const ClientType& type, double t_th) {
    if (!(t_th >= 1.0) || !(t_th < params.T))
        throw std::domain_error("stationarity residual requires 1 <= T_th < T");
    const double r2 = params.r * params.r;
    const double horizon = params.T - t_th;
    const double decay = std::pow(r2, t_th);
    const double scale = std::pow(params.b * type.tau * type.tau * (1.0 - r2) /
                                      (params.alpha * type.s * type.s * r2 * (1.0 - decay) * horizon),
                                  0.2);
    const double bracket = 2.0 * decay * std::log(params.r) / (1.0 - decay) + 1.0 / horizon;
    return 0.2 * kCostCoefficient * scale * bracket + type.tau / (horizon * horizon);
}

// Cutoff on tau^{3/5} separating single-slot recruitment from an interior
// threshold. Nonpositive cutoff means every training time is "high" and the
// optimum is one recruitment slot.
inline double single_slot_cutoff(const MarketParams& params, const ClientType& type) {
    const double r2 = params.r * params.r;
    const double span = static_cast<double>(params.T - 1);
    return 0.2 * std::pow(params.b / (params.alpha * type.s * type.s * r2), 0.2) * kCostCoefficient *
           (2.0 * std::abs(std::log(params.r)) * r2 / (1.0 - r2) * std::pow(span, 1.8) -
            std::pow(span, 0.8));
}

enum class ThresholdRegime {
    HighTrainingTime,  // tau^{3/5} >= cutoff: recruit for one slot only
    LowTrainingTime,   // interior root of the stationarity equation
};

struct ThresholdAnalysis {
    double cutoff{0.0};                  // single-slot cutoff on tau^{3/5}
    ThresholdRegime regime{ThresholdRegime::HighTrainingTime};
    std::optional<double> t_th_real{};   // root of the stationarity equation (low regime)
    int t_th_star{1};
    double cost_at_star{0.0};
};

namespace detail {

// Bisection on a monotone-increasing residual. The bracket is [1, T-1]:
// callers guarantee f(1) < 0, and f(T-1) > 0 holds for every r < 1, T >= 2.
template <typename F>
double bisect_increasing(F&& residual, double lo, double hi) {
    double f_lo = residual(lo);
    if (f_lo >= 0.0) return lo;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = residual(mid);
        if (std::abs(f_mid) < 1e-12) return mid;
        if (f_mid >= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Optimal integer recruitment threshold. High-training-time regime returns 1
// outright; otherwise the real root is bisected and the two neighbouring
// integers compared, ties toward the smaller threshold.
inline ThresholdAnalysis optimal_threshold(const MarketParams& params, const ClientType& type) {
    ThresholdAnalysis analysis;
    analysis.cutoff = single_slot_cutoff(params, type);

    if (std::pow(type.tau, 0.6) >= analysis.cutoff) {
        analysis.regime = ThresholdRegime::HighTrainingTime;
        analysis.t_th_star = 1;
        analysis.cost_at_star = total_cost(params, type, 1);
        return analysis;
    }

    analysis.regime = ThresholdRegime::LowTrainingTime;
    const double root = detail::bisect_increasing(
        [&](double x) { return stationarity_residual(params, type, x); }, 1.0,
        static_cast<double>(params.T - 1));
    analysis.t_th_real = root;

    const int lo = std::clamp(static_cast<int>(std::floor(root)), 1, params.T - 1);
    const int hi = std::clamp(lo + 1, 1, params.T - 1);
    const double cost_lo = total_cost(params, type, lo);
    const double cost_hi = hi == lo ? cost_lo : total_cost(params, type, hi);
    if (cost_improves(cost_hi, cost_lo)) {
        analysis.t_th_star = hi;
        analysis.cost_at_star = cost_hi;
    } else {
        analysis.t_th_star = lo;
        analysis.cost_at_star = cost_lo;
    }
    return analysis;
}

// Optimal flat price over all recruitment slots (the benchmark strategy),
//   min{ (D^2 b^3 tau^3 (1-r) / (16 T_th^2 alpha^3 s r (1-r^{T_th})))^{1/5},
//        b (T - T_th) }.
inline double static_price(const MarketParams& params, const ClientType& type, int t_th) {
    const double D = iteration_count(params, t_th, type.tau);
    const double cap = params.b * (params.T - t_th);
    const double inner = D * D * std::pow(params.b * type.tau, 3) * (1.0 - params.r) /
                         (16.0 * t_th * t_th * std::pow(params.alpha, 3) * type.s * params.r *
                          (1.0 - std::pow(params.r, t_th)));
    return std::min(std::pow(inner, 0.2), cap);
}

inline PriceSchedule static_schedule(const MarketParams& params, const ClientType& type, int t_th) {
    const double price = static_price(params, type, t_th);
    return PriceSchedule::scalar(std::vector<double>(static_cast<std::size_t>(t_th), price));
}

// Costate of the discrete-time optimality system,
//   lambda(t) = -(1/2) r^{T_th - t} D^{-1/2} B(T_th)^{-3/2}.
// Diagnostic only: the per-slot optimality condition p(t) = -(r s / 2)
// lambda(t+1) can be checked numerically against the closed-form schedule.
inline double costate(const MarketParams& params, const ClientType& type, int t_th, int t) {
    const double D = iteration_count(params, t_th, type.tau);
    const double B = final_data_size(params, type, t_th);
    return -0.5 * std::pow(params.r, t_th - t) / std::sqrt(D) / std::pow(B, 1.5);
}

}  // namespace flpricing
