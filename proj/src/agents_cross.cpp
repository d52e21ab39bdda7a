#include "abcem/agents_cross.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace abcem {

std::pair<double, double> inaction_interval(double switch_price, double alpha) {
    return {switch_price / (1.0 + alpha), switch_price * (1.0 + alpha)};
}

double update_herding_pressure(double pressure, int position, double excess_demand,
                               double delta_t) {
    if (position * excess_demand < 0) return pressure + delta_t * std::abs(excess_demand);
    return pressure;
}

bool update_cross_agent(CrossAgentState& agent, double price, double excess_demand,
                        double delta_t) {
    agent.pressure = update_herding_pressure(agent.pressure, agent.position, excess_demand,
                                             delta_t);
    const auto [lo, hi] = inaction_interval(agent.switch_price, agent.inaction);
    if (agent.pressure > agent.herding_limit || price < lo || price > hi) {
        agent.position = -agent.position;
        agent.pressure = 0.0;
        agent.switch_price = price;
        return true;
    }
    return false;
}

double update_cross_wealth(double wealth, double stock_fraction, double interest_rate,
                           double price, double prev_price, double delta_t) {
    const double rate = (1.0 - stock_fraction) * interest_rate +
                        stock_fraction * (price - prev_price) / (delta_t * price);
    const double next = wealth + delta_t * rate * wealth;
    if (!std::isfinite(next)) throw EngineError("wealth update produced a non-finite value");
    return next;
}

CrossPopulation::CrossPopulation(std::size_t count, const CrossParams& params,
                                 double initial_price, double delta_t, RandomGenerator& rng)
    : params_(params) {
    if (count == 0) throw std::invalid_argument("population needs at least one agent");
    if (!(params.a1 < params.a2) || !(params.a1 > 0))
        throw std::invalid_argument("inaction thresholds require 0 < A1 < A2");
    if (!(params.b1 < params.b2) || !(params.b1 > 0))
        throw std::invalid_argument("herding thresholds require 0 < b1 < b2");
    static constexpr std::array<int, 2> kPositions{-1, 1};
    const double beta_lo = params.b1 * delta_t;
    const double beta_hi = params.b2 * delta_t;
    agents_.resize(count);
    for (auto& agent : agents_) {
        agent.inaction = rng.next_uniform(params.a1, params.a2);
        agent.herding_limit = rng.next_uniform(beta_lo, beta_hi);
        agent.pressure = beta_lo + rng.next_uniform(0.0, 1.0) * (beta_hi - beta_lo);
        agent.switch_price = initial_price;
        agent.position = rng.pick<int>(kPositions);
        position_sum_ += agent.position;
    }
    if (params.wealth_enabled) wealth_.assign(count, params.initial_wealth);
}

CrossPopulation::CrossPopulation(std::vector<CrossAgentState> agents, const CrossParams& params)
    : agents_(std::move(agents)), params_(params) {
    if (agents_.empty()) throw std::invalid_argument("population needs at least one agent");
    for (const auto& agent : agents_) position_sum_ += agent.position;
    if (params.wealth_enabled) wealth_.assign(agents_.size(), params.initial_wealth);
}

double CrossPopulation::initial_excess_demand() const {
    // the initial-value table reduces to the mean of the initial positions
    return static_cast<double>(position_sum_) / static_cast<double>(agents_.size());
}

void CrossPopulation::update(const MarketState& market, RandomGenerator&) {
    const double price = market.price;
    const double ed = market.excess_demand;
    const double dt = market.clock.delta_t;
    for (auto& agent : agents_) {
        const int before = agent.position;
        if (update_cross_agent(agent, price, ed, dt)) position_sum_ -= 2 * before;
    }
    if (!wealth_.empty()) {
        for (auto& w : wealth_)
            w = update_cross_wealth(w, params_.stock_fraction, params_.interest_rate, price,
                                    market.prev_price, dt);
    }
}

void CrossPopulation::record(Recorder& recorder) const {
    if (!wealth_.empty()) {
        double sum = 0.0;
        for (double w : wealth_) sum += w;
        recorder.append("mean_wealth", sum / static_cast<double>(wealth_.size()));
    }
}

void CrossPopulation::record_snapshots(Recorder& recorder) const {
    if (!wealth_.empty()) recorder.set_snapshot("final_wealth", wealth_);
}

std::vector<std::string> CrossPopulation::observable_names() const {
    if (params_.wealth_enabled) return {"mean_wealth", "final_wealth"};
    return {};
}

}  // namespace abcem
