#include "abcem/runner.hpp"

#include <atomic>
#include <future>
#include <sstream>

namespace abcem {

RunOutput run_simulation(const SimulationConfig& config, std::int64_t run_index) {
    if (run_index < 0) throw EngineError("run index must be non-negative");
    const std::uint64_t run_seed =
        derive_run_seed(config.plan.master_seed, static_cast<std::uint64_t>(run_index));
    Assembly assembly = assemble(config, run_seed);
    StockExchange exchange(*assembly.population, *assembly.ed_calc, *assembly.price_calc,
                           *assembly.rng, config.plan.delta_t, config.plan.num_steps);
    Recorder recorder = config.recording ? Recorder(*config.recording) : Recorder();
    const double wall = exchange.run(recorder);

    RunOutput output;
    output.wall_time_seconds = wall;
    output.embedded_config = config.source_text;
    output.master_seed = config.plan.master_seed;
    output.run_seed = run_seed;
    output.run_index = run_index;
    auto& series = recorder.series();
    output.price_series = std::move(series.at("price"));
    output.ed_series = std::move(series.at("excess_demand"));
    series.erase("price");
    series.erase("excess_demand");
    output.observables = std::move(series);
    output.snapshots = std::move(recorder.snapshots());

    const auto expected = static_cast<std::size_t>(config.plan.num_steps) + 1;
    if (output.price_series.size() != expected)
        throw EngineError("price series length does not match the run plan");
    for (const auto& [name, values] : output.observables)
        if (values.size() != expected)
            throw EngineError("series \"" + name + "\" length does not match the run plan");
    return output;
}

std::vector<RunOutput> run_plan(const SimulationConfig& config, unsigned threads) {
    const auto repetitions = static_cast<std::size_t>(config.plan.repetitions);
    std::vector<RunOutput> outputs(repetitions);
    if (threads <= 1 || repetitions <= 1) {
        for (std::size_t i = 0; i < repetitions; ++i)
            outputs[i] = run_simulation(config, static_cast<std::int64_t>(i));
        return outputs;
    }
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < repetitions; i = next.fetch_add(1))
            outputs[i] = run_simulation(config, static_cast<std::int64_t>(i));
    };
    std::vector<std::future<void>> futures;
    const unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(repetitions));
    futures.reserve(workers);
    for (unsigned t = 0; t < workers; ++t)
        futures.push_back(std::async(std::launch::async, worker));
    for (auto& future : futures) future.get();
    return outputs;
}

double measure_runtime(const SimulationConfig& config, std::int64_t run_index) {
    return run_simulation(config, run_index).wall_time_seconds;
}

std::vector<BenchRow> bench_cross(const std::vector<std::size_t>& agent_counts,
                                  const std::vector<std::int64_t>& step_counts,
                                  int repetitions, std::uint64_t master_seed) {
    std::vector<BenchRow> rows;
    for (std::size_t agents : agent_counts) {
        for (std::int64_t steps : step_counts) {
            SimulationConfig config;
            config.plan = {steps, 4e-5, 1, master_seed};
            config.rng = {RngAlgorithm::MersenneTwister64, 0, RngMode::Pooled, 1 << 16};
            CrossAgentConfig block;
            block.count = agents;
            block.params = CrossParams{};
            config.agents.push_back(block);
            config.ed_kind = EdCalculatorKind::MeanDecision;
            config.price.kind = PriceRuleKind::CrossExponential;
            config.price.initial_price = 1.0;
            config.price.theta = 0.0;
            config.price.market_depth = 0.2;
            std::ostringstream text;
            text << "bench cross agents=" << agents << " steps=" << steps;
            config.source_text = text.str();
            for (int rep = 0; rep < repetitions; ++rep)
                rows.push_back({"cross", agents, steps, rep, measure_runtime(config, rep)});
        }
    }
    return rows;
}

}  // namespace abcem
