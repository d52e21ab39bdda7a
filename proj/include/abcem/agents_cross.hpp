#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "abcem/engine.hpp"

namespace abcem {

/// One threshold trader: a binary position that flips under herding pressure
/// or when the price leaves the inaction band around the last switch price.
struct CrossAgentState {
    int position = 1;            // +1 long, -1 short
    double pressure = 0.0;       // accumulated herding pressure, time units
    double switch_price = 1.0;   // price of the last switch
    double inaction = 0.1;       // alpha: half-width factor of the band
    double herding_limit = 0.0;  // beta: pressure threshold, time units
};

struct CrossParams {
    double a1 = 0.1, a2 = 0.3;   // inaction threshold ~ U(a1, a2)
    double b1 = 25.0, b2 = 100.0;  // herding threshold ~ U(b1 dt, b2 dt)
    bool wealth_enabled = false;
    double interest_rate = 0.0;
    double stock_fraction = 0.0;  // gamma, fraction of wealth tracking the stock
    double initial_wealth = 1.0;
};

/// Inaction band [m / (1 + alpha), m (1 + alpha)].
std::pair<double, double> inaction_interval(double switch_price, double alpha);

/// pressure + dt |ED| while the position opposes the aggregate, else unchanged.
double update_herding_pressure(double pressure, int position, double excess_demand,
                               double delta_t);

/// Applies one step to a single agent: herding first, then at most one flip
/// (pressure over the limit or price outside the band). On a flip the
/// pressure resets and the band re-centers on the current price. Returns
/// whether the position flipped.
bool update_cross_agent(CrossAgentState& agent, double price, double excess_demand,
                        double delta_t);

/// w + dt [(1 - gamma) r + gamma (S - S_prev) / (dt S)] w.
double update_cross_wealth(double wealth, double stock_fraction, double interest_rate,
                           double price, double prev_price, double delta_t);

class CrossPopulation final : public AgentPopulation {
public:
    /// Randomized initial population: alpha ~ U(a1, a2), beta ~ U(b1 dt, b2 dt),
    /// pressure = b1 dt + u (b2 - b1) dt, switch price = initial price,
    /// position ~ Unifd({-1, +1}). Draw order per agent: alpha, beta,
    /// pressure, position.
    CrossPopulation(std::size_t count, const CrossParams& params, double initial_price,
                    double delta_t, RandomGenerator& rng);

    /// Explicit initial state, for hand-constructed scenarios.
    CrossPopulation(std::vector<CrossAgentState> agents, const CrossParams& params);

    std::size_t size() const override { return agents_.size(); }
    PopulationTraits traits() const override { return {.decision_mean = true}; }
    double initial_excess_demand() const override;
    double decision_sum() const override { return static_cast<double>(position_sum_); }

    void update(const MarketState& market, RandomGenerator& rng) override;

    void record(Recorder& recorder) const override;
    void record_snapshots(Recorder& recorder) const override;
    std::vector<std::string> observable_names() const override;

    const std::vector<CrossAgentState>& agents() const { return agents_; }
    const std::vector<double>& wealth() const { return wealth_; }

private:
    std::vector<CrossAgentState> agents_;
    std::vector<double> wealth_;  // empty unless the wealth extension is on
    CrossParams params_;
    std::int64_t position_sum_ = 0;
};

}  // namespace abcem
