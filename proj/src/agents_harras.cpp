#include "abcem/agents_harras.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace abcem {

namespace {
constexpr double kSigmaFloor = 1e-8;  // keeps the trust updates finite
}

std::vector<std::array<std::uint32_t, 4>> build_lattice(std::size_t count) {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(count))));
    if (side * side != count)
        throw std::invalid_argument("lattice population size must be a perfect square");
    std::vector<std::array<std::uint32_t, 4>> neighbors(count);
    for (std::size_t row = 0; row < side; ++row) {
        for (std::size_t col = 0; col < side; ++col) {
            const std::size_t i = row * side + col;
            neighbors[i] = {
                static_cast<std::uint32_t>(row * side + (col + 1) % side),
                static_cast<std::uint32_t>(row * side + (col + side - 1) % side),
                static_cast<std::uint32_t>(((row + 1) % side) * side + col),
                static_cast<std::uint32_t>(((row + side - 1) % side) * side + col),
            };
        }
    }
    return neighbors;
}

double compute_opinion(double c1, std::span<const double> trust,
                       std::span<const int> expectations, double news_weight, double news,
                       double c2, double c3, double private_signal, OpinionMode mode) {
    double neighbor_term = 0.0;
    for (std::size_t j = 0; j < trust.size(); ++j) neighbor_term += trust[j] * expectations[j];
    if (mode == OpinionMode::NeighborMean) neighbor_term *= 0.25;
    return c1 * neighbor_term + c2 * news_weight * news + c3 * private_signal;
}

int decide_action(double opinion, double threshold) {
    if (threshold < 0) throw std::invalid_argument("decision threshold must be >= 0");
    if (opinion > threshold) return 1;
    if (opinion < -threshold) return -1;
    return 0;
}

double trading_volume(int action, double fraction, double cash, double stock, double price) {
    if (!(price > 0)) throw std::invalid_argument("trading volume needs a positive price");
    if (!(fraction > 0 && fraction < 1))
        throw std::invalid_argument("trade fraction must lie in (0, 1)");
    if (action == 1) return std::max(0.0, fraction * cash / price);
    if (action == -1) return fraction * stock;
    return 0.0;
}

double update_feedback(MarketFeedback& feedback, double ed_now, double ed_prev,
                       double news_prev) {
    const double alpha = feedback.alpha;
    feedback.mean_ed = alpha * feedback.mean_ed + (1.0 - alpha) * ed_prev;
    const double dev = ed_prev - feedback.mean_ed;
    feedback.sigma2_ed = alpha * feedback.sigma2_ed + (1.0 - alpha) * dev * dev;
    const double ratio = ed_now / std::max(std::sqrt(feedback.sigma2_ed), kSigmaFloor);
    feedback.news_weight = alpha * feedback.news_weight + (1.0 - alpha) * news_prev * ratio;
    return ratio;
}

std::pair<double, double> settle_trade(double cash, double stock, int action, double volume,
                                       double price) {
    if (volume < 0) throw std::invalid_argument("trading volume must be non-negative");
    return {cash - action * volume * price, stock + action * volume};
}

HarrasPopulation::HarrasPopulation(std::size_t count, const HarrasParams& params,
                                   RandomGenerator& rng)
    : params_(params), neighbors_(build_lattice(count)) {
    if (params.c1_max < 0 || params.c2_max < 0 || params.c3_max < 0 || params.omega < 0)
        throw std::invalid_argument("weight and threshold ranges must be non-negative");
    if (!(params.alpha > 0 && params.alpha < 1))
        throw std::invalid_argument("feedback smoothing alpha must lie in (0, 1)");
    if (!(params.market_depth > 0))
        throw std::invalid_argument("market depth must be positive");
    feedback_.alpha = params.alpha;
    c1_.resize(count);
    c2_.resize(count);
    c3_.resize(count);
    threshold_.resize(count);
    trust_.resize(count);
    expectation_.resize(count);
    static constexpr std::array<int, 3> kActions{-1, 0, 1};
    const auto draw_weight = [&rng](double upper) {
        return upper > 0 ? rng.next_uniform(0.0, upper) : 0.0;
    };
    for (std::size_t i = 0; i < count; ++i) {
        c1_[i] = draw_weight(params.c1_max);
        c2_[i] = draw_weight(params.c2_max);
        c3_[i] = draw_weight(params.c3_max);
        threshold_[i] = params.omega > 0 ? rng.next_uniform(0.0, params.omega) : 0.0;
        for (auto& k : trust_[i]) k = rng.next_uniform(0.0, 1.0);
        for (auto& e : expectation_[i]) e = rng.pick<int>(kActions);
    }
    cash_.assign(count, 1.0);
    stock_.assign(count, 1.0);
    volume_.assign(count, 0.0);
    decision_.assign(count, 0);
    order_.resize(count);
    std::iota(order_.begin(), order_.end(), 0);
}

double HarrasPopulation::decision_sum() const {
    double sum = 0.0;
    for (signed char d : decision_) sum += d;
    return sum;
}

double HarrasPopulation::signed_volume_sum() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < volume_.size(); ++i) sum += decision_[i] * volume_[i];
    return sum;
}

void HarrasPopulation::update(const MarketState& market, RandomGenerator& rng) {
    const std::size_t n = size();
    // orders placed last step settle at the price they moved
    for (std::size_t i = 0; i < n; ++i) {
        if (decision_[i] == 0) continue;
        auto [cash, stock] =
            settle_trade(cash_[i], stock_[i], decision_[i], volume_[i], market.price);
        cash_[i] = cash;
        stock_[i] = stock;
    }
    // the initial feedback values are the state of the first trading step;
    // the recursions start once a completed step lies behind them
    if (market.clock.step_index >= 2) {
        const double ratio = update_feedback(feedback_, market.excess_demand,
                                             market.prev_excess_demand, news_);
        const double alpha = feedback_.alpha;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                trust_[i][j] = update_trust(trust_[i][j], alpha, expectation_[i][j], ratio);
    }
    // expectations snapshot the previous step's actions before any overwrite
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            expectation_[i][j] = decision_[neighbors_[i][j]];

    news_ = rng.next_normal(0.0, 1.0);
    rng.shuffle(order_);
    for (std::uint32_t idx : order_) {
        const double private_signal = rng.next_normal(0.0, 1.0);
        const double psi = compute_opinion(
            c1_[idx], trust_[idx], expectation_[idx], feedback_.news_weight, news_, c2_[idx],
            c3_[idx], private_signal, params_.opinion);
        decision_[idx] = static_cast<signed char>(decide_action(psi, threshold_[idx]));
        volume_[idx] = trading_volume(decision_[idx], params_.trade_fraction, cash_[idx],
                                      stock_[idx], market.price);
    }
}

void HarrasPopulation::set_agent(std::size_t i, double c1, double c2, double c3,
                                 double threshold, const std::array<double, 4>& trust,
                                 const std::array<int, 4>& expectations, double cash,
                                 double stock, int decision, double volume) {
    c1_[i] = c1;
    c2_[i] = c2;
    c3_[i] = c3;
    threshold_[i] = threshold;
    trust_[i] = trust;
    expectation_[i] = expectations;
    cash_[i] = cash;
    stock_[i] = stock;
    decision_[i] = static_cast<signed char>(decision);
    volume_[i] = volume;
}

}  // namespace abcem
