#include "abcem/engine.hpp"

#include <chrono>
#include <cmath>

namespace abcem {

StockExchange::StockExchange(AgentPopulation& population, ExcessDemandCalculator& ed_calc,
                             PriceCalculator& price_calc, RandomGenerator& rng, double delta_t,
                             std::int64_t num_steps)
    : population_(population), ed_calc_(ed_calc), price_calc_(price_calc), rng_(rng) {
    if (!(delta_t > 0)) throw EngineError("delta_t must be positive");
    if (num_steps < 0) throw EngineError("num_steps must be non-negative");
    ed_calc_.check_compatible(population_);
    price_calc_.check_compatible(population_);
    market_.clock = SimulationClock{0, delta_t, num_steps};
    market_.price = market_.prev_price = price_calc_.initial_price();
    if (!(market_.price > 0) || !std::isfinite(market_.price))
        throw EngineError("initial price must be positive and finite");
    market_.excess_demand = market_.prev_excess_demand = population_.initial_excess_demand();
}

void StockExchange::step() {
    auto& m = market_;
    m.clock.step_index += 1;
    const auto k = m.clock.step_index;

    population_.begin_step(m, rng_);

    m.prev_excess_demand = m.excess_demand;
    m.excess_demand = ed_calc_.compute(population_, m);
    if (!std::isfinite(m.excess_demand))
        throw EngineError("step " + std::to_string(k) + ": excess demand is not finite");

    m.prev_price = m.price;
    m.price = price_calc_.compute(m, population_, rng_);
    if (!std::isfinite(m.price))
        throw EngineError("step " + std::to_string(k) + ": price is not finite");
    if (!(m.price > 0))
        throw EngineError("step " + std::to_string(k) + ": price " +
                          std::to_string(m.price) + " is not positive");

    population_.update(m, rng_);
}

void StockExchange::record_row(Recorder& recorder) const {
    recorder.append("price", market_.price);
    recorder.append("excess_demand", market_.excess_demand);
    population_.record(recorder);
}

double StockExchange::run(Recorder& recorder) {
    record_row(recorder);  // step 0: the initial state is part of every series
    const auto t0 = std::chrono::steady_clock::now();
    while (market_.clock.step_index < market_.clock.num_steps) {
        step();
        record_row(recorder);
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
    population_.record_snapshots(recorder);
    return elapsed.count();
}

}  // namespace abcem
