#pragma once
// Brute-force ground truth for the closed forms: exhaustive grid search over
// price sequences, exhaustive threshold scan, and exhaustive subset
// enumeration. Deliberately naive; guarded against the exponential blow-up.

#include <algorithm>
#include <cstdint>
#include <future>
#include <limits>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "flpricing/core.hpp"
#include "flpricing/heterogeneous.hpp"

namespace flpricing::oracle {

struct GridSpec {
    double step{1e-3};  // price resolution
    int max_t_th{4};    // refuse searches beyond this many recruitment slots
};

struct GridSearchResult {
    PriceSchedule schedule;
    double cost{std::numeric_limits<double>::infinity()};
    std::uint64_t evaluations{0};
};

namespace detail {

struct GridAxes {
    std::vector<std::vector<double>> values;  // one axis per (slot, type) dimension
    std::vector<double> weight;               // alpha q_i / (b tau_i D), per type
    std::vector<double> contrib;              // alpha q_i s_i / (b tau_i D), per type
    std::size_t num_types{0};
    double r{0.0};
    double iterations{0.0};
};

struct BestPoint {
    double cost{std::numeric_limits<double>::infinity()};
    std::uint64_t index{0};
    bool valid{false};

    void offer(double cost_candidate, std::uint64_t index_candidate) {
        if (!valid || cost_improves(cost_candidate, cost)) {
            cost = cost_candidate;
            index = index_candidate;
            valid = true;
        }
    }
    // Chunks are merged in ascending dimension-0 order, so ties keep the
    // lexicographically smallest grid point.
    void merge(const BestPoint& other) {
        if (other.valid && (!valid || cost_improves(other.cost, cost))) *this = other;
    }
};

// Depth-first scan carrying partial payment, aged data, and the current
// slot's pending contribution. This is the evaluator's recursion unrolled
// over the grid tree; the winner is re-evaluated through evaluate_schedule.
inline void scan(const GridAxes& axes, std::size_t dim, double payment, double data,
                 double increment, std::uint64_t index, BestPoint& best) {
    const std::size_t dims = axes.values.size();
    const std::size_t type = dim % axes.num_types;
    const bool closes_slot = type == axes.num_types - 1;
    const std::vector<double>& axis = axes.values[dim];

    if (dim == dims - 1) {
        for (std::size_t k = 0; k < axis.size(); ++k) {
            const double p = axis[k];
            const double final_data = axes.r * (data + increment + axes.contrib[type] * p);
            const double loss = final_data > 0.0
                                    ? 1.0 / std::sqrt(final_data * axes.iterations)
                                    : std::numeric_limits<double>::infinity();
            const double cost =
                payment + axes.weight[type] * p * p + loss + 1.0 / axes.iterations;
            best.offer(cost, index * axis.size() + k);
        }
        return;
    }
    for (std::size_t k = 0; k < axis.size(); ++k) {
        const double p = axis[k];
        const double pay_next = payment + axes.weight[type] * p * p;
        const double inc_next = increment + axes.contrib[type] * p;
        if (closes_slot)
            scan(axes, dim + 1, pay_next, axes.r * (data + inc_next), 0.0,
                 index * axis.size() + k, best);
        else
            scan(axes, dim + 1, pay_next, data, inc_next, index * axis.size() + k, best);
    }
}

}  // namespace detail

// Exhaustive search over every schedule on the price grid {0, step, 2 step,
// ...} per (slot, type), range [0, cap] inclusive where the cap divides the
// step. Convexity of the objective in each price puts the true optimum
// within one grid cell of the winner. Work grows as points^(T_th * N);
// thresholds beyond grid.max_t_th are refused outright.
inline GridSearchResult grid_search_prices(const MarketParams& params,
                                           std::span<const ClientType> types, int t_th,
                                           const GridSpec& grid) {
    if (grid.max_t_th > 4)
        throw std::invalid_argument("grid search guard: max_t_th must not exceed 4");
    if (t_th > grid.max_t_th)
        throw std::invalid_argument("grid search refused: T_th exceeds max_t_th");
    if (!(grid.step > 0.0))
        throw std::invalid_argument("grid step must be positive");
    const double D = iteration_count(params, t_th, flpricing::detail::governing_tau(types));

    detail::GridAxes axes;
    axes.num_types = types.size();
    axes.r = params.r;
    axes.iterations = D;
    for (const ClientType& type : types) {
        const double denom = params.b * type.tau * D;
        axes.weight.push_back(params.alpha * type.q / denom);
        axes.contrib.push_back(params.alpha * type.q * type.s / denom);
    }

    std::uint64_t total_points = 1;
    for (int t = 0; t < t_th; ++t) {
        for (std::size_t i = 0; i < types.size(); ++i) {
            const double cap = params.b * types[i].tau * D;
            const auto count = static_cast<std::size_t>(std::floor(cap / grid.step + 1e-9)) + 1;
            std::vector<double> axis(count);
            for (std::size_t k = 0; k < count; ++k) axis[k] = std::min(k * grid.step, cap);
            total_points *= axis.size();
            axes.values.push_back(std::move(axis));
        }
    }

    // Parallel over the first axis; chunks merged in order for determinism.
    const std::vector<double>& first = axes.values[0];
    const std::size_t workers =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), first.size());
    std::vector<std::future<detail::BestPoint>> futures;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = first.size() * w / workers;
        const std::size_t end = first.size() * (w + 1) / workers;
        futures.push_back(std::async(std::launch::async, [&, begin, end] {
            detail::BestPoint local;
            for (std::size_t k = begin; k < end; ++k) {
                const double p = first[k];
                const double pay = axes.weight[0] * p * p;
                const double inc = axes.contrib[0] * p;
                if (axes.values.size() == 1) {
                    const double final_data = axes.r * inc;
                    const double loss = final_data > 0.0
                                            ? 1.0 / std::sqrt(final_data * D)
                                            : std::numeric_limits<double>::infinity();
                    local.offer(pay + loss + 1.0 / D, k);
                } else if (axes.num_types == 1) {
                    detail::scan(axes, 1, pay, axes.r * inc, 0.0, k, local);
                } else {
                    detail::scan(axes, 1, pay, 0.0, inc, k, local);
                }
            }
            return local;
        }));
    }
    detail::BestPoint best;
    for (auto& f : futures) best.merge(f.get());

    // Decode the mixed-radix winner back into a schedule.
    PriceSchedule schedule = PriceSchedule::zeros(static_cast<std::size_t>(t_th), types.size());
    std::uint64_t index = best.index;
    for (std::size_t dim = axes.values.size(); dim-- > 0;) {
        const std::size_t k = index % axes.values[dim].size();
        index /= axes.values[dim].size();
        schedule.values[dim] = axes.values[dim][k];
    }

    GridSearchResult result;
    result.schedule = std::move(schedule);
    result.cost = evaluate_schedule(params, t_th, result.schedule, types).cost.total;
    result.evaluations = total_points;
    return result;
}

struct ThresholdScanResult {
    int t_th_star{1};
    double cost{std::numeric_limits<double>::infinity()};
};

// Evaluates the analytic (or capped general) cost at every integer threshold
// and keeps the argmin, ties toward the smaller threshold.
inline ThresholdScanResult exhaustive_threshold(const MarketParams& params,
                                                std::span<const ClientType> types) {
    ThresholdScanResult best;
    for (int t_th = 1; t_th <= params.T - 1; ++t_th) {
        const double cost = prefix_cost(params, types, t_th);
        if (t_th == 1 || cost_improves(cost, best.cost)) {
            best.t_th_star = t_th;
            best.cost = cost;
        }
    }
    return best;
}

struct SubsetSearchResult {
    std::vector<int> subset;  // ascending type indices, 0-based
    int t_th_star{1};
    double cost{std::numeric_limits<double>::infinity()};
};

// Enumerates all 2^N - 1 nonempty subsets, optimizing the threshold for each.
// Ties keep the lexicographically smallest subset, matching the prefix
// selection's smaller-j tie-break.
inline SubsetSearchResult exhaustive_subsets(const MarketParams& params, const ClientTypeSet& set) {
    if (set.size() > 5)
        throw std::invalid_argument("exhaustive_subsets refused: more than 5 client types");
    SubsetSearchResult best;
    bool have_best = false;
    for (unsigned mask = 1; mask < (1u << set.size()); ++mask) {
        std::vector<int> indices;
        std::vector<ClientType> subset;
        for (std::size_t i = 0; i < set.size(); ++i) {
            if (mask & (1u << i)) {
                indices.push_back(static_cast<int>(i));
                subset.push_back(set[i]);
            }
        }
        const ThresholdScanResult scan = exhaustive_threshold(params, subset);
        const bool better = !have_best || cost_improves(scan.cost, best.cost);
        const bool tie_breaks = have_best && !cost_improves(scan.cost, best.cost) &&
                                !cost_improves(best.cost, scan.cost) &&
                                std::lexicographical_compare(indices.begin(), indices.end(),
                                                             best.subset.begin(), best.subset.end());
        if (better || tie_breaks) {
            best.subset = std::move(indices);
            best.t_th_star = scan.t_th_star;
            best.cost = scan.cost;
            have_best = true;
        }
    }
    return best;
}

}  // namespace flpricing::oracle
