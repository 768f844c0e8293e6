#include <catch2/catch_amalgamated.hpp>

#include "flpricing/homogeneous.hpp"
#include "flpricing/oracle.hpp"
#include "helpers.hpp"

using namespace flpricing;
using Catch::Approx;

namespace {
const MarketParams kMarket = testutil::paper_market();
const ClientType kClient = testutil::paper_client();
}  // namespace

TEST_CASE("price_schedule: section-6 values", "[homogeneous][pricing]") {
    const PriceSchedule one = price_schedule(kMarket, kClient, 1);
    REQUIRE(one.slots() == 1);
    CHECK(one.at(0) == Approx(2.0965).margin(1e-4));
    CHECK_FALSE(one.clamped);

    const PriceSchedule three = price_schedule(kMarket, kClient, 3);
    REQUIRE(three.slots() == 3);
    CHECK(three.at(0) < three.at(1));
    CHECK(three.at(1) < three.at(2));
    for (std::size_t t = 0; t < 3; ++t) CHECK(three.at(t) <= 7.0);
    CHECK_THROWS_AS(price_schedule(kMarket, kClient, 10), std::out_of_range);
}

TEST_CASE("price_schedule: strict increase and inactive clamp in regime", "[homogeneous][property]") {
    SplitMix64 rng(101);
    for (int k = 0; k < 500; ++k) {
        const auto draw = testutil::draw_regime(rng);
        const int t_th =
            1 + static_cast<int>(rng.next() % static_cast<unsigned>(draw.market.T - 1));
        const PriceSchedule schedule = price_schedule(draw.market, draw.client, t_th);
        const double cap = draw.market.b * (draw.market.T - t_th);
        CHECK_FALSE(schedule.clamped);
        for (std::size_t t = 0; t < schedule.slots(); ++t) {
            CHECK(schedule.at(t) <= cap * (1.0 + 1e-12));
            if (t + 1 < schedule.slots()) CHECK(schedule.at(t) < schedule.at(t + 1));
        }
    }
}

TEST_CASE("final_data_size: section-6 value and evaluator agreement", "[homogeneous]") {
    CHECK(final_data_size(kMarket, kClient, 1) == Approx(0.05824).margin(5e-5));

    SplitMix64 rng(103);
    const ClientType types[1] = {kClient};
    for (int k = 0; k < 300; ++k) {
        const auto draw = testutil::draw_regime(rng);
        const ClientType draw_types[1] = {draw.client};
        const int t_th =
            1 + static_cast<int>(rng.next() % static_cast<unsigned>(draw.market.T - 1));
        const PriceSchedule schedule = price_schedule(draw.market, draw.client, t_th);
        const double recursion =
            evaluate_schedule(draw.market, t_th, schedule, draw_types).final_data_size;
        const double closed = final_data_size(draw.market, draw.client, t_th);
        CHECK(testutil::rel_diff(recursion, closed) < 1e-10);
    }
    (void)types;
}

TEST_CASE("total_cost: section-6 values match the evaluator", "[homogeneous]") {
    CHECK(total_cost(kMarket, kClient, 1) == Approx(1.2765).margin(1e-3));
    CHECK(total_cost(kMarket, kClient, 2) == Approx(1.2579).margin(1e-3));
    CHECK(total_cost(kMarket, kClient, 3) == Approx(1.2873).margin(1e-3));

    const ClientType types[1] = {kClient};
    for (int t_th : {1, 2, 3, 5, 8}) {
        const PriceSchedule schedule = price_schedule(kMarket, kClient, t_th);
        const double evaluated = evaluate_schedule(kMarket, t_th, schedule, types).cost.total;
        CHECK(testutil::rel_diff(evaluated, total_cost(kMarket, kClient, t_th)) < 1e-9);
    }
}

TEST_CASE("single_slot_cutoff: sign structure", "[homogeneous]") {
    const double cutoff = single_slot_cutoff(kMarket, kClient);
    CHECK(cutoff > 0.0);
    // classification of tau = 0.5 agrees with the residual sign at T_th = 1
    const bool high = std::pow(kClient.tau, 0.6) >= cutoff;
    const bool residual_nonneg = stationarity_residual(kMarket, kClient, 1.0) >= 0.0;
    CHECK(high == residual_nonneg);

    // T = 2: both horizon powers collapse to 1
    MarketParams tiny = kMarket;
    tiny.T = 2;
    const double r2 = tiny.r * tiny.r;
    const double expected = 0.2 * std::pow(tiny.b / (tiny.alpha * r2), 0.2) * kCostCoefficient *
                            (2.0 * std::abs(std::log(tiny.r)) * r2 / (1.0 - r2) - 1.0);
    CHECK(single_slot_cutoff(tiny, kClient) == Approx(expected).epsilon(1e-14));
}

TEST_CASE("single_slot_cutoff equivalence with the residual over draws", "[homogeneous][property]") {
    SplitMix64 rng(107);
    for (int k = 0; k < 500; ++k) {
        const auto draw = testutil::draw_regime(rng);
        const bool high = std::pow(draw.client.tau, 0.6) >= single_slot_cutoff(draw.market, draw.client);
        const bool residual_nonneg = stationarity_residual(draw.market, draw.client, 1.0) >= 0.0;
        CHECK(high == residual_nonneg);
    }
}

TEST_CASE("stationarity_residual: shape", "[homogeneous]") {
    CHECK_THROWS_AS(stationarity_residual(kMarket, kClient, 10.0), std::domain_error);

    SplitMix64 rng(109);
    for (int k = 0; k < 300; ++k) {
        const auto draw = testutil::draw_regime(rng);
        // positive at the right end for every draw
        CHECK(stationarity_residual(draw.market, draw.client,
                                    static_cast<double>(draw.market.T - 1)) > 0.0);
        // strictly increasing along the feasible range
        double previous = stationarity_residual(draw.market, draw.client, 1.0);
        for (double x = 1.25; x < draw.market.T - 1; x += 0.25) {
            const double value = stationarity_residual(draw.market, draw.client, x);
            CHECK(value > previous);
            previous = value;
        }
    }
}

TEST_CASE("optimal_threshold: section-6 and high-training-time branch", "[homogeneous][threshold]") {
    const ThresholdAnalysis analysis = optimal_threshold(kMarket, kClient);
    CHECK(analysis.t_th_star == 2);
    CHECK(analysis.regime == ThresholdRegime::LowTrainingTime);
    REQUIRE(analysis.t_th_real.has_value());
    CHECK(*analysis.t_th_real > 1.0);
    CHECK(*analysis.t_th_real < 9.0);
    CHECK(analysis.cost_at_star == Approx(1.2579).margin(1e-3));
    // integer local optimality
    CHECK(analysis.cost_at_star <= total_cost(kMarket, kClient, 1) + kCostTolerance);
    CHECK(analysis.cost_at_star <= total_cost(kMarket, kClient, 3) + kCostTolerance);

    ClientType slow = kClient;
    slow.s = 40.0;
    slow.tau = 40.0;
    const ThresholdAnalysis high = optimal_threshold(kMarket, slow);
    CHECK(high.regime == ThresholdRegime::HighTrainingTime);
    CHECK(high.t_th_star == 1);
    CHECK_FALSE(high.t_th_real.has_value());
}

TEST_CASE("optimal_threshold equals the exhaustive scan on the 200-point sweep",
          "[homogeneous][threshold][property]") {
    for (const auto& point : testutil::threshold_sweep_points()) {
        const ThresholdAnalysis analysis = optimal_threshold(point.market, point.client);
        const ClientType types[1] = {point.client};
        const auto scan = oracle::exhaustive_threshold(point.market, types);
        INFO("T=" << point.market.T << " r=" << point.market.r << " tau=" << point.client.tau);
        CHECK(analysis.t_th_star == scan.t_th_star);
    }
}

TEST_CASE("total_cost is quasiconvex over integer thresholds in regime",
          "[homogeneous][property]") {
    SplitMix64 rng(113);
    for (int k = 0; k < 300; ++k) {
        const auto draw = testutil::draw_regime(rng);
        // once the successive differences turn positive they must stay positive
        bool rising = false;
        bool quasiconvex = true;
        for (int t_th = 1; t_th + 1 <= draw.market.T - 1; ++t_th) {
            const double diff = total_cost(draw.market, draw.client, t_th + 1) -
                                total_cost(draw.market, draw.client, t_th);
            if (diff > kCostTolerance) rising = true;
            else if (diff < -kCostTolerance && rising) quasiconvex = false;
        }
        CHECK(quasiconvex);
    }
}

TEST_CASE("threshold trend in T and r", "[homogeneous][threshold]") {
    int previous = 1;
    for (int T = 5; T <= 50; ++T) {
        MarketParams market = testutil::paper_market(T);
        const int star = optimal_threshold(market, kClient).t_th_star;
        CHECK(star >= previous);
        previous = star;
    }
    previous = 1;
    for (int i = 0; i < 10; ++i) {
        MarketParams market = testutil::paper_market(50);
        market.r = 0.5 + 0.05 * i;
        const int star = optimal_threshold(market, kClient).t_th_star;
        CHECK(star >= previous);
        previous = star;
    }
}

TEST_CASE("static_price: single-slot coincidence and benchmark dominance", "[homogeneous][static]") {
    const PriceSchedule dynamic = price_schedule(kMarket, kClient, 1);
    CHECK(testutil::rel_diff(static_price(kMarket, kClient, 1), dynamic.at(0)) < 1e-12);

    const ClientType types[1] = {kClient};
    for (int T = 5; T <= 60; ++T) {
        MarketParams market = testutil::paper_market(T);
        const ThresholdAnalysis analysis = optimal_threshold(market, kClient);
        const PriceSchedule flat = static_schedule(market, kClient, analysis.t_th_star);
        const double flat_cost =
            evaluate_schedule(market, analysis.t_th_star, flat, types).cost.total;
        CHECK(analysis.cost_at_star <= flat_cost + kCostTolerance);
    }
}

TEST_CASE("costate satisfies the per-slot optimality condition", "[homogeneous][costate]") {
    const int t_th = 3;
    const PriceSchedule schedule = price_schedule(kMarket, kClient, t_th);
    const double D = iteration_count(kMarket, t_th, kClient.tau);
    const double horizon = kMarket.T - t_th;
    for (int t = 0; t < t_th; ++t) {
        const double lambda_next = costate(kMarket, kClient, t_th, t + 1);
        // p(t) = -(r s / 2) lambda(t + 1)
        CHECK(testutil::rel_diff(schedule.at(static_cast<std::size_t>(t)),
                                 -0.5 * kMarket.r * kClient.s * lambda_next) < 1e-10);
        // numeric stationarity of the per-slot objective
        auto hamiltonian = [&](double p) {
            return kMarket.alpha / (kMarket.b * horizon) * p * p +
                   lambda_next * ((kMarket.r - 1.0) * 0.1 +
                                  kMarket.r * kMarket.alpha * kClient.s / (kMarket.b * horizon) * p);
        };
        const double p = schedule.at(static_cast<std::size_t>(t));
        const double h = 1e-6 * std::max(1.0, p);
        const double derivative = (hamiltonian(p + h) - hamiltonian(p - h)) / (2.0 * h);
        CHECK(std::abs(derivative) < 1e-6);
    }
    (void)D;
}
