#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "abcem/rng.hpp"

namespace abcem {

struct SimulationClock {
    std::int64_t step_index = 0;
    double delta_t = 1.0;
    std::int64_t num_steps = 0;
};

/// Market state shared by all building blocks. prev_* always hold the values
/// of the previously accepted step, so delta_ed() is the one-step change the
/// pricing rules consume.
struct MarketState {
    double price = 1.0;
    double prev_price = 1.0;
    double excess_demand = 0.0;
    double prev_excess_demand = 0.0;
    SimulationClock clock;

    double delta_ed() const { return excess_demand - prev_excess_demand; }
};

class EngineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Collects named per-step series plus end-of-run snapshot vectors. An
/// optional selection restricts which observables are kept; "price" and
/// "excess_demand" are always recorded.
class Recorder {
public:
    Recorder() = default;
    explicit Recorder(std::set<std::string> selection) : selection_(std::move(selection)) {}

    void append(const std::string& name, double value) {
        if (enabled(name)) series_[name].push_back(value);
    }
    void set_snapshot(const std::string& name, std::vector<double> values) {
        if (enabled(name)) snapshots_[name] = std::move(values);
    }

    bool enabled(const std::string& name) const {
        return !selection_ || name == "price" || name == "excess_demand" ||
               selection_->count(name) > 0;
    }

    std::map<std::string, std::vector<double>>& series() { return series_; }
    std::map<std::string, std::vector<double>>& snapshots() { return snapshots_; }

private:
    std::optional<std::set<std::string>> selection_;
    std::map<std::string, std::vector<double>> series_;
    std::map<std::string, std::vector<double>> snapshots_;
};

/// Capabilities a population offers to market mechanisms; assemblies are
/// validated against these before a simulation is built.
struct PopulationTraits {
    bool decision_mean = false;       // per-agent decisions with a meaningful mean
    bool traded_volume = false;       // per-agent signed trading volumes
    bool clearance_mismatch = false;  // can evaluate hypothetical clearing prices
};

/// A collection of agents of one type. One step of the exchange calls
/// begin_step (pre-demand preparation), lets the excess-demand and price
/// calculators read the pre-update state, and then calls update with the new
/// price in market.price and this step's excess demand in
/// market.excess_demand.
class AgentPopulation {
public:
    virtual ~AgentPopulation() = default;

    virtual std::size_t size() const = 0;
    virtual PopulationTraits traits() const = 0;

    virtual void begin_step(const MarketState& market, RandomGenerator& rng) {
        (void)market;
        (void)rng;
    }
    virtual void update(const MarketState& market, RandomGenerator& rng) = 0;

    /// Excess demand to record for the initial (step 0) state.
    virtual double initial_excess_demand() const { return 0.0; }

    virtual double decision_sum() const {
        throw EngineError("population does not expose decisions");
    }
    virtual double signed_volume_sum() const {
        throw EngineError("population does not expose trading volumes");
    }
    /// Aggregate demanded-minus-held shares at a hypothetical price; pure in
    /// the candidate given the frozen pre-step state.
    virtual double clearance_mismatch(double candidate_price) {
        (void)candidate_price;
        throw EngineError("population does not support rational-market clearance");
    }

    virtual void record(Recorder& recorder) const { (void)recorder; }
    virtual void record_snapshots(Recorder& recorder) const { (void)recorder; }
    virtual std::vector<std::string> observable_names() const { return {}; }
};

class ExcessDemandCalculator {
public:
    virtual ~ExcessDemandCalculator() = default;
    virtual double compute(AgentPopulation& population, const MarketState& market) const = 0;
    /// Throws EngineError if the population lacks a required capability.
    virtual void check_compatible(const AgentPopulation& population) const = 0;
    virtual std::string name() const = 0;
};

class PriceCalculator {
public:
    virtual ~PriceCalculator() = default;
    virtual double compute(const MarketState& market, AgentPopulation& population,
                           RandomGenerator& rng) = 0;
    virtual void check_compatible(const AgentPopulation& population) const { (void)population; }
    virtual double initial_price() const = 0;
    virtual std::string name() const = 0;
};

/// Orchestrates one simulation: per step, excess demand is aggregated from
/// pre-update agent states, the price calculator produces the next price
/// (re-evaluating agents through the clearance callback in a rational
/// market), and all agents are updated against the new price.
class StockExchange {
public:
    StockExchange(AgentPopulation& population, ExcessDemandCalculator& ed_calc,
                  PriceCalculator& price_calc, RandomGenerator& rng, double delta_t,
                  std::int64_t num_steps);

    void step();

    /// Runs all remaining steps, recording one row per step plus the initial
    /// state. Returns the wall time of the loop in seconds.
    double run(Recorder& recorder);

    const MarketState& market() const { return market_; }
    MarketState& market() { return market_; }

private:
    void record_row(Recorder& recorder) const;

    AgentPopulation& population_;
    ExcessDemandCalculator& ed_calc_;
    PriceCalculator& price_calc_;
    RandomGenerator& rng_;
    MarketState market_;
};

struct RunOutput {
    std::vector<double> price_series;
    std::vector<double> ed_series;
    std::map<std::string, std::vector<double>> observables;
    std::map<std::string, std::vector<double>> snapshots;
    double wall_time_seconds = 0.0;
    std::string embedded_config;
    std::uint64_t master_seed = 0;
    std::uint64_t run_seed = 0;
    std::int64_t run_index = 0;
};

}  // namespace abcem
