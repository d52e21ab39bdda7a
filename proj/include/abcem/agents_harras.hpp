#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "abcem/engine.hpp"

namespace abcem {

enum class OpinionMode {
    NeighborMean,  // trust-weighted neighbor term divided by the 4 neighbors
    NeighborSum    // plain trust-weighted sum
};

struct HarrasParams {
    double c1_max = 0.0;  // weight ranges; a weight with zero range is zero
    double c2_max = 1.0;
    double c3_max = 1.0;
    double omega = 2.0;        // decision thresholds ~ U(0, omega)
    double trade_fraction = 0.02;  // g, fraction of cash/stock per trade
    double alpha = 0.95;       // exponential-smoothing memory
    double market_depth = 0.25;  // lambda, used by the volume aggregation
    OpinionMode opinion = OpinionMode::NeighborMean;
};

/// Exponentially smoothed market feedback shared by all agents.
struct MarketFeedback {
    double news_weight = 0.0;  // u
    double sigma2_ed = 0.1;
    double mean_ed = 0.0;
    double alpha = 0.95;
};

/// Von Neumann neighborhoods on the periodic LxL lattice, L*L == count.
/// Throws if count is not a perfect square.
std::vector<std::array<std::uint32_t, 4>> build_lattice(std::size_t count);

/// c1 * (sum_j k_j E_j) [/4 in NeighborMean] + c2 * u * news + c3 * private_signal.
double compute_opinion(double c1, std::span<const double> trust,
                       std::span<const int> expectations, double news_weight, double news,
                       double c2, double c3, double private_signal, OpinionMode mode);

/// +1 above the threshold, -1 below its negative, 0 otherwise (ties hold).
int decide_action(double opinion, double threshold);

/// g * cash / price when buying, g * stock when selling, 0 when holding.
/// Never negative; a buyer without positive cash trades nothing.
double trading_volume(int action, double fraction, double cash, double stock, double price);

/// Updates the smoothed mean and variance from the previous step's excess
/// demand, then returns ED_now / sigma_ED (floored at 1e-8) -- the factor the
/// news weight and all trust weights are updated with.
double update_feedback(MarketFeedback& feedback, double ed_now, double ed_prev,
                       double news_prev);

inline double update_trust(double trust, double alpha, int expectation, double ratio) {
    return alpha * trust + (1.0 - alpha) * expectation * ratio;
}

/// cash' = cash - action * volume * price, stock' = stock + action * volume.
std::pair<double, double> settle_trade(double cash, double stock, int action, double volume,
                                       double price);

class HarrasPopulation final : public AgentPopulation {
public:
    /// Draw order per agent: c1, c2, c3 (skipping zero-range weights),
    /// threshold, 4 trust weights, 4 neighbor expectations.
    HarrasPopulation(std::size_t count, const HarrasParams& params, RandomGenerator& rng);

    std::size_t size() const override { return cash_.size(); }
    PopulationTraits traits() const override {
        return {.decision_mean = true, .traded_volume = true};
    }
    double decision_sum() const override;
    double signed_volume_sum() const override;

    void update(const MarketState& market, RandomGenerator& rng) override;

    const MarketFeedback& feedback() const { return feedback_; }
    MarketFeedback& feedback() { return feedback_; }
    const std::vector<std::array<std::uint32_t, 4>>& lattice() const { return neighbors_; }
    std::span<const double> cash() const { return cash_; }
    std::span<const double> stock() const { return stock_; }
    std::span<const signed char> decisions() const { return {decision_.data(), decision_.size()}; }
    std::span<const double> volumes() const { return volume_; }

    // direct state access for hand-constructed scenarios
    void set_agent(std::size_t i, double c1, double c2, double c3, double threshold,
                   const std::array<double, 4>& trust, const std::array<int, 4>& expectations,
                   double cash, double stock, int decision, double volume);
    void set_news(double previous_news) { news_ = previous_news; }

    double market_depth() const { return params_.market_depth; }

private:
    HarrasParams params_;
    std::vector<std::array<std::uint32_t, 4>> neighbors_;
    std::vector<double> c1_, c2_, c3_, threshold_;
    std::vector<std::array<double, 4>> trust_;
    std::vector<std::array<int, 4>> expectation_;
    std::vector<double> cash_, stock_, volume_;
    std::vector<signed char> decision_;
    std::vector<std::uint32_t> order_;
    MarketFeedback feedback_;
    double news_ = 0.0;  // news of the previous step, n(t_{k-1})
};

}  // namespace abcem
