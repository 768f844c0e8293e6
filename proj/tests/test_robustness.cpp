#include <catch2/catch_amalgamated.hpp>

#include "flpricing/robustness.hpp"
#include "helpers.hpp"

using namespace flpricing;
using Catch::Approx;

namespace {

const MarketParams kMarket = testutil::paper_market();
const std::vector<ClientType> kTypes = testutil::disparity_types(1.0, 0.01);
constexpr int kThreshold = 2;

// d Phi / d delta_i in closed form, derived independently of the bound:
// Phi = S (A^{3/10} C^{-1/2} - A^{-1/5}) and dC/d delta_i = -q_i s_i / tau_i.
double penalty_slope(const MarketParams& params, std::span<const ClientType> types, int t_th,
                     const NoiseModel& noise, std::size_t i) {
    const double A = type_aggregate(types);
    double C = 0.0;
    for (std::size_t k = 0; k < types.size(); ++k)
        C += types[k].q * types[k].s * (types[k].s - noise.deltas[k]) / types[k].tau;
    const double scale = std::pow(4.0, 0.2) *
                         std::pow(params.b * detail::governing_tau(types) *
                                      (1.0 - params.r * params.r) /
                                      (params.alpha * params.r * params.r * (params.T - t_th) *
                                       (1.0 - std::pow(params.r * params.r, t_th))),
                                  0.2);
    return scale * std::pow(A, 0.3) * 0.5 * std::pow(C, -1.5) * types[i].q * types[i].s /
           types[i].tau;
}

}  // namespace

TEST_CASE("worst_case_penalty: zero noise, growth, and domain", "[robustness]") {
    const NoiseModel none = NoiseModel::fraction_of_size(kTypes, 0.0);
    CHECK(std::abs(worst_case_penalty(kMarket, kTypes, kThreshold, none)) < 1e-12);

    const NoiseModel small = NoiseModel::fraction_of_size(kTypes, 0.1);
    const NoiseModel doubled = NoiseModel::fraction_of_size(kTypes, 0.2);
    const double phi_small = worst_case_penalty(kMarket, kTypes, kThreshold, small);
    const double phi_doubled = worst_case_penalty(kMarket, kTypes, kThreshold, doubled);
    CHECK(phi_small > 0.0);
    CHECK(phi_doubled > phi_small);

    NoiseModel too_wide = small;
    too_wide.deltas[0] = kTypes[0].s;
    CHECK_THROWS_AS(worst_case_penalty(kMarket, kTypes, kThreshold, too_wide), std::domain_error);
    NoiseModel mismatched;
    mismatched.deltas = {0.1};
    CHECK_THROWS_AS(worst_case_penalty(kMarket, kTypes, kThreshold, mismatched),
                    std::invalid_argument);
}

TEST_CASE("worst_case_penalty: monotone across a noise sweep", "[robustness]") {
    double previous = -1.0;
    for (double fraction : {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4}) {
        const NoiseModel noise = NoiseModel::fraction_of_size(kTypes, fraction);
        const double phi = worst_case_penalty(kMarket, kTypes, kThreshold, noise);
        CHECK(phi > previous);
        previous = phi;
    }
}

TEST_CASE("worst_case_cost: additive identity with the nominal cost", "[robustness]") {
    for (double fraction : {0.0, 0.1, 0.2, 0.3}) {
        const NoiseModel noise = NoiseModel::fraction_of_size(kTypes, fraction);
        const double nominal = prefix_cost_uncapped(kMarket, kTypes, kThreshold);
        const double worst = worst_case_cost(kMarket, kTypes, kThreshold, noise);
        const double penalty = worst_case_penalty(kMarket, kTypes, kThreshold, noise);
        CHECK(worst >= nominal);
        CHECK(testutil::rel_diff(worst, nominal + penalty) < 1e-9);
        if (fraction == 0.0) CHECK(worst == Approx(nominal).epsilon(1e-12));
    }
}

TEST_CASE("worst_case_cost: cross-route against payment plus depleted loss", "[robustness]") {
    const NoiseModel noise = NoiseModel::fraction_of_size(kTypes, 0.2);
    const double depleted = worst_case_data_size(kMarket, kTypes, kThreshold, noise);
    const double D = iteration_count(kMarket, kThreshold, detail::governing_tau(kTypes));
    const double payment =
        prefix_cost_general(kMarket, kTypes, kThreshold).cost.payment;
    const double assembled = payment + accuracy_loss(depleted, D);
    CHECK(testutil::rel_diff(assembled, worst_case_cost(kMarket, kTypes, kThreshold, noise)) <
          1e-9);
}

TEST_CASE("worst_case_data_size: noiseless limit equals the evaluator", "[robustness]") {
    const NoiseModel none = NoiseModel::fraction_of_size(kTypes, 0.0);
    const double depleted = worst_case_data_size(kMarket, kTypes, kThreshold, none);
    const double nominal = prefix_cost_general(kMarket, kTypes, kThreshold).final_data_size;
    CHECK(testutil::rel_diff(depleted, nominal) < 1e-9);

    double previous = depleted;
    for (double fraction : {0.1, 0.2, 0.3}) {
        const double value = worst_case_data_size(kMarket, kTypes, kThreshold,
                                                  NoiseModel::fraction_of_size(kTypes, fraction));
        CHECK(value < previous);
        previous = value;
    }
}

TEST_CASE("worst_case_penalty: finite differences match the analytic slope",
          "[robustness][property]") {
    const NoiseModel noise = NoiseModel::fraction_of_size(kTypes, 0.15);
    for (std::size_t i = 0; i < kTypes.size(); ++i) {
        const double h = 1e-6 * kTypes[i].s;
        NoiseModel plus = noise, minus = noise;
        plus.deltas[i] += h;
        minus.deltas[i] -= h;
        const double numeric = (worst_case_penalty(kMarket, kTypes, kThreshold, plus) -
                                worst_case_penalty(kMarket, kTypes, kThreshold, minus)) /
                               (2.0 * h);
        const double analytic = penalty_slope(kMarket, kTypes, kThreshold, noise, i);
        CHECK(analytic > 0.0);
        CHECK(testutil::rel_diff(numeric, analytic) < 1e-4);
    }
}

TEST_CASE("worst_case_penalty: invariant under consistent permutation", "[robustness]") {
    const NoiseModel noise{std::vector<double>{0.1, 0.3, 0.2, 0.05, 0.4}};
    const double reference = worst_case_penalty(kMarket, kTypes, kThreshold, noise);
    const std::size_t order[5] = {3, 0, 4, 1, 2};
    std::vector<ClientType> permuted_types;
    NoiseModel permuted_noise;
    for (std::size_t i : order) {
        permuted_types.push_back(kTypes[i]);
        permuted_noise.deltas.push_back(noise.deltas[i]);
    }
    CHECK(testutil::rel_diff(
              worst_case_penalty(kMarket, permuted_types, kThreshold, permuted_noise), reference) <
          1e-12);
}
