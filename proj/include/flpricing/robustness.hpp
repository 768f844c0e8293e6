#pragma once
// Worst-case and average-case sensitivity of the optimal policy to noisy
// per-arrival data sizes. The policy itself is computed from the mean sizes;
// only the realized contributions move.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "flpricing/core.hpp"
#include "flpricing/heterogeneous.hpp"

namespace flpricing {

// Per-type half-widths of the data-size band [s_i - delta_i, s_i + delta_i].
struct NoiseModel {
    std::vector<double> deltas;

    static NoiseModel fraction_of_size(std::span<const ClientType> types, double fraction) {
        NoiseModel noise;
        noise.deltas.reserve(types.size());
        for (const ClientType& t : types) noise.deltas.push_back(fraction * t.s);
        return noise;
    }
};

namespace detail {

inline void check_noise(std::span<const ClientType> types, const NoiseModel& noise) {
    if (noise.deltas.size() != types.size())
        throw std::invalid_argument("noise model size does not match client-type prefix");
    for (std::size_t i = 0; i < types.size(); ++i) {
        if (noise.deltas[i] < 0.0 || noise.deltas[i] >= types[i].s)
            throw std::domain_error("noise half-width must satisfy 0 <= delta_i < s_i");
    }
}

// sum_i q_i s_i (s_i - delta_i) / tau_i, the worst-case counterpart of the
// type aggregate.
inline double depleted_aggregate(std::span<const ClientType> types, const NoiseModel& noise) {
    double sum = 0.0;
    for (std::size_t i = 0; i < types.size(); ++i)
        sum += types[i].q * types[i].s * (types[i].s - noise.deltas[i]) / types[i].tau;
    return sum;
}

inline double robustness_scale(const MarketParams& params, std::span<const ClientType> types,
                               int t_th) {
    const double tau_gov = governing_tau(types);
    iteration_count(params, t_th, tau_gov);  // range check
    const double r2 = params.r * params.r;
    return std::pow(params.b * tau_gov * (1.0 - r2) /
                        (params.alpha * r2 * (params.T - t_th) * (1.0 - std::pow(r2, t_th))),
                    0.2);
}

}  // namespace detail

// Additive worst-case penalty on the total cost:
//   Phi = (4 b tau_N (1-r^2) / (alpha r^2 (T-T_th)(1-r^{2 T_th})))^{1/5}
//         * (A^{3/10} / C^{1/2} - A^{-1/5}),
// with A the nominal aggregate and C its depleted counterpart. Zero at
// delta = 0 and strictly increasing in every delta_i.
inline double worst_case_penalty(const MarketParams& params, std::span<const ClientType> types,
                                 int t_th, const NoiseModel& noise) {
    detail::check_noise(types, noise);
    const double A = type_aggregate(types);
    const double C = detail::depleted_aggregate(types, noise);
    return std::pow(4.0, 0.2) * detail::robustness_scale(params, types, t_th) *
           (std::pow(A, 0.3) / std::sqrt(C) - std::pow(A, -0.2));
}

// Expected final data size when every accepted arrival contributes its
// worst-case size s_i - delta_i under the unchanged nominal prices.
inline double worst_case_data_size(const MarketParams& params, std::span<const ClientType> types,
                                   int t_th, const NoiseModel& noise) {
    detail::check_noise(types, noise);
    const double D = iteration_count(params, t_th, detail::governing_tau(types));
    const double r2 = params.r * params.r;
    const double A = type_aggregate(types);
    const double C = detail::depleted_aggregate(types, noise);
    return std::pow(params.alpha * params.alpha /
                        (16.0 * params.b * params.b * D * D * D * std::pow(A, 3)),
                    0.2) *
           C * std::pow(r2 * (1.0 - std::pow(r2, t_th)) / (1.0 - r2), 0.4);
}

// Worst-case total cost J-bar: nominal payment plus the accuracy loss at the
// depleted data size. Satisfies J-bar = J + Phi identically and J-bar >= J.
// Valid in the uncapped pricing regime the bound is derived for.
inline double worst_case_cost(const MarketParams& params, std::span<const ClientType> types,
                              int t_th, const NoiseModel& noise) {
    detail::check_noise(types, noise);
    if (cap_flags(params, types, t_th).any())
        throw std::logic_error("worst_case_cost: a participation cap is active");
    const double tau_gov = detail::governing_tau(types);
    const double A = type_aggregate(types);
    const double C = detail::depleted_aggregate(types, noise);
    const double scale = detail::robustness_scale(params, types, t_th);
    return tau_gov / (params.T - t_th) +
           scale * (std::pow(4.0, 0.2) * std::pow(A, 0.3) / std::sqrt(C) +
                    std::pow(4.0, -0.8) * std::pow(A, -0.2));
}

}  // namespace flpricing
