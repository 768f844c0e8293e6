#pragma once
// Shared domain types for the client-recruitment market, parameter validation,
// the accuracy-loss surrogate, and the expected-cost evaluator that every other
// module (closed forms, oracle, simulator) is checked against.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace flpricing {

// 4^{-4/5} + 4^{1/5}, the coefficient shared by every closed-form cost below.
inline const double kCostCoefficient = std::pow(4.0, -0.8) + std::pow(4.0, 0.2);

// Absolute tolerance for comparing candidate costs before tie-breaking.
inline constexpr double kCostTolerance = 1e-12;

// Strictly-better test used by every argmin in the library. Ties (within
// kCostTolerance) are resolved by the caller's tie-break rule, which is
// always "keep the earlier candidate".
inline bool cost_improves(double candidate, double incumbent) {
    return candidate < incumbent - kCostTolerance;
}

struct MarketParams {
    double alpha{0.5};  // client arrival probability per slot, in (0,1]
    double b{1.0};      // upper bound of the private unit cost support
    double r{0.5};      // per-slot data-aging discount, in (0,1)
    int T{10};          // total horizon in slots, >= 2

    int max_threshold() const { return T - 1; }
};

struct ClientType {
    double s{1.0};    // data size contributed on acceptance
    double tau{0.5};  // training time per global iteration
    double q{1.0};    // population share among arrivals

    double training_rate() const { return s / tau; }
};

// Global iteration count left after recruiting for t_th slots. Kept
// real-valued; all closed forms below are well defined for non-integer D.
inline double iteration_count(const MarketParams& params, int t_th, double tau) {
    if (t_th < 1 || t_th > params.T - 1)
        throw std::out_of_range("recruitment threshold outside [1, T-1]: " + std::to_string(t_th));
    if (!(tau > 0.0))
        throw std::domain_error("iteration duration must be positive");
    return (params.T - t_th) / tau;
}

struct HorizonSplit {
    int t_th{1};         // recruitment slots
    double iterations{};  // (T - t_th) / tau for the governing tau

    static HorizonSplit make(const MarketParams& params, int t_th, double tau) {
        return {t_th, iteration_count(params, t_th, tau)};
    }
};

// 1/sqrt(B*D) + 1/D. The training phase's entire footprint in this model.
inline double accuracy_loss(double data_size, double iterations) {
    if (!(data_size > 0.0))
        throw std::domain_error("accuracy_loss: data size must be positive");
    if (!(iterations > 0.0))
        throw std::domain_error("accuracy_loss: iteration count must be positive");
    return 1.0 / std::sqrt(data_size * iterations) + 1.0 / iterations;
}

struct CostBreakdown {
    double payment{0.0};         // expected total payment over the recruitment phase
    double accuracy_loss{0.0};   // 1/sqrt(B(T_th) * D), +inf when B(T_th) = 0
    double iteration_loss{0.0};  // 1/D
    double total{0.0};           // sum of the three, computed once at assembly

    static CostBreakdown assemble(double payment, double accuracy, double iteration) {
        return {payment, accuracy, iteration, payment + accuracy + iteration};
    }
};

// One arrival opportunity in a simulated replica.
struct ClientEvent {
    int slot{0};
    bool arrived{false};
    int type_index{-1};               // index into the invited prefix, -1 if uninvited
    std::optional<double> cost{};     // private unit cost, present only on arrival of an invited type
    bool accepted{false};
    double payoff{0.0};               // price - cost * tau_i * D when accepted, else 0
    double contribution{0.0};         // realized data size added when accepted, else 0
};

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    bool ok() const { return errors.empty(); }
};

// Hard errors are violated type invariants; warnings flag parameters outside
// the regime in which the closed-form guarantees (cap never binds, unique
// interior root) were proved.
inline ValidationReport validate_params(const MarketParams& params, std::span<const ClientType> types) {
    ValidationReport report;
    auto error = [&](std::string msg) { report.errors.push_back(std::move(msg)); };
    auto warn = [&](std::string msg) { report.warnings.push_back(std::move(msg)); };

    if (!(params.alpha > 0.0) || params.alpha > 1.0)
        error("arrival rate must satisfy 0 < alpha <= 1");
    if (!(params.b > 0.0))
        error("cost bound must satisfy b > 0");
    if (!(params.r > 0.0))
        error("aging factor must satisfy r > 0");
    if (params.r >= 1.0)
        error("aging factor must satisfy r < 1");
    if (params.T < 2)
        error("horizon must satisfy T >= 2");
    if (types.empty())
        error("at least one client type required");

    double share_sum = 0.0;
    for (std::size_t i = 0; i < types.size(); ++i) {
        const ClientType& t = types[i];
        if (!(t.s > 0.0))
            error("type " + std::to_string(i + 1) + ": data size must be positive");
        if (!(t.tau > 0.0))
            error("type " + std::to_string(i + 1) + ": training time must be positive");
        if (!(t.q > 0.0) || t.q > 1.0)
            error("type " + std::to_string(i + 1) + ": share must lie in (0, 1]");
        if (i > 0 && !(types[i - 1].s < t.s && types[i - 1].tau < t.tau))
            error("types must be strictly ascending in (s, tau)");
        share_sum += t.q;
    }
    if (!types.empty() && std::abs(share_sum - 1.0) > 1e-6)
        error("type shares must sum to 1 (got " + std::to_string(share_sum) + ")");

    if (report.ok()) {
        if (params.alpha < 0.5)
            warn("arrival rate below paper regime (alpha < 0.5)");
        if (params.b < 1.0)
            warn("cost bound below paper regime (b < 1)");
        if (params.r < 0.5)
            warn("aging factor below paper regime (r < 0.5)");
        for (std::size_t i = 0; i < types.size(); ++i)
            if (types[i].training_rate() < 1.0)
                warn("type " + std::to_string(i + 1) + " training efficiency below paper regime (s/tau < 1)");
    }
    return report;
}

// Ascending list of client types whose shares sum to 1. Shares within 1e-6 of
// unity are renormalized at construction; anything else is rejected.
class ClientTypeSet {
public:
    static ClientTypeSet create(std::vector<ClientType> types) {
        if (types.empty())
            throw std::invalid_argument("ClientTypeSet: at least one client type required");
        double share_sum = 0.0;
        for (std::size_t i = 0; i < types.size(); ++i) {
            const ClientType& t = types[i];
            if (!(t.s > 0.0) || !(t.tau > 0.0) || !(t.q > 0.0) || t.q > 1.0)
                throw std::invalid_argument("ClientTypeSet: type " + std::to_string(i + 1) +
                                            " violates s > 0, tau > 0, 0 < q <= 1");
            if (i > 0 && !(types[i - 1].s < t.s && types[i - 1].tau < t.tau))
                throw std::invalid_argument("ClientTypeSet: types must be strictly ascending in (s, tau)");
            share_sum += t.q;
        }
        if (std::abs(share_sum - 1.0) > 1e-6)
            throw std::invalid_argument("ClientTypeSet: shares must sum to 1");
        for (ClientType& t : types) t.q /= share_sum;
        return ClientTypeSet(std::move(types));
    }

    std::size_t size() const { return types_.size(); }
    const ClientType& operator[](std::size_t i) const { return types_[i]; }
    const std::vector<ClientType>& types() const { return types_; }

    // First j types; the only invitation sets the optimal policy ever uses.
    std::span<const ClientType> prefix(std::size_t j) const {
        return std::span<const ClientType>(types_.data(), j);
    }
    std::span<const ClientType> all() const { return prefix(types_.size()); }

private:
    explicit ClientTypeSet(std::vector<ClientType> types) : types_(std::move(types)) {}
    std::vector<ClientType> types_;
};

// Per-slot prices; scalar schedules are the num_types == 1 case.
struct PriceSchedule {
    std::size_t num_types{1};
    std::vector<double> values;  // slot-major: values[t * num_types + i]
    bool clamped{false};         // any entry sits on its participation cap

    std::size_t slots() const { return num_types ? values.size() / num_types : 0; }
    double at(std::size_t t, std::size_t i = 0) const { return values[t * num_types + i]; }
    double& at(std::size_t t, std::size_t i = 0) { return values[t * num_types + i]; }

    static PriceSchedule scalar(std::vector<double> per_slot) {
        PriceSchedule s;
        s.num_types = 1;
        s.values = std::move(per_slot);
        return s;
    }
    static PriceSchedule zeros(std::size_t slots, std::size_t num_types) {
        PriceSchedule s;
        s.num_types = num_types;
        s.values.assign(slots * num_types, 0.0);
        return s;
    }
};

struct ScheduleEvaluation {
    CostBreakdown cost;
    double final_data_size{0.0};  // expected B(T_th)
};

namespace detail {

// The governing iteration duration is the slowest invited type's; every
// other client waits for it within the synchronous round.
inline double governing_tau(std::span<const ClientType> types) {
    if (types.empty())
        throw std::invalid_argument("empty client-type prefix");
    double max_tau = types.front().tau;
    for (const ClientType& t : types) max_tau = std::max(max_tau, t.tau);
    return max_tau;
}

}  // namespace detail

// Expected-cost forward recursion
//   B(t+1) = r * (B(t) + sum_i alpha q_i s_i p_i(t) / (b tau_i D)),  B(0) = 0,
// with expected payment sum_t sum_i alpha q_i p_i(t)^2 / (b tau_i D). Works for
// any feasible schedule, optimal or not; the oracle and the simulator both
// reuse it. A schedule that recruits nothing yields the infinite-loss
// sentinel rather than an error so grid searches can walk degenerate corners.
inline ScheduleEvaluation evaluate_schedule(const MarketParams& params, int t_th,
                                            const PriceSchedule& schedule,
                                            std::span<const ClientType> types) {
    const double tau_gov = detail::governing_tau(types);
    const double D = iteration_count(params, t_th, tau_gov);
    if (schedule.num_types != types.size())
        throw std::invalid_argument("schedule type count does not match client-type prefix");
    if (schedule.slots() != static_cast<std::size_t>(t_th))
        throw std::invalid_argument("schedule must have exactly T_th slots");

    double payment = 0.0;
    double data = 0.0;
    for (int t = 0; t < t_th; ++t) {
        double increment = 0.0;
        for (std::size_t i = 0; i < types.size(); ++i) {
            const ClientType& type = types[i];
            const double price = schedule.at(t, i);
            const double cap = params.b * type.tau * D;
            if (price < 0.0)
                throw std::invalid_argument("negative price for type " + std::to_string(i + 1) +
                                            " at slot " + std::to_string(t));
            if (price > cap * (1.0 + 1e-12) + 1e-15)
                throw std::invalid_argument("price cap violated for type " + std::to_string(i + 1) +
                                            " at slot " + std::to_string(t));
            const double accept_mass = params.alpha * type.q * price / cap;
            payment += accept_mass * price;
            increment += accept_mass * type.s;
        }
        data = params.r * (data + increment);
    }

    const double loss = data > 0.0 ? 1.0 / std::sqrt(data * D)
                                   : std::numeric_limits<double>::infinity();
    return {CostBreakdown::assemble(payment, loss, 1.0 / D), data};
}

}  // namespace flpricing
