#pragma once

#include <memory>
#include <vector>

#include "abcem/config.hpp"
#include "abcem/engine.hpp"

namespace abcem {

/// A fully built model: per-run generator, agent blocks (behind a single
/// population view when there are several), and the market mechanisms.
struct Assembly {
    std::unique_ptr<RandomGenerator> rng;
    std::vector<std::unique_ptr<AgentPopulation>> blocks;
    AgentPopulation* population = nullptr;  // single block or the composite view
    std::unique_ptr<AgentPopulation> composite;
    std::unique_ptr<ExcessDemandCalculator> ed_calc;
    std::unique_ptr<PriceCalculator> price_calc;
};

Assembly assemble(const SimulationConfig& config, std::uint64_t run_seed);

/// One deterministic run: seed = derive_run_seed(master, run_index), every
/// series of length num_steps + 1, the configuration text embedded verbatim.
RunOutput run_simulation(const SimulationConfig& config, std::int64_t run_index);

/// All repetitions of the plan. Runs are independent (own agents, market
/// state and stream), so any thread count yields identical outputs.
std::vector<RunOutput> run_plan(const SimulationConfig& config, unsigned threads = 1);

/// Wall time of the simulation loop only (no setup, no output).
double measure_runtime(const SimulationConfig& config, std::int64_t run_index = 0);

struct BenchRow {
    std::string model;
    std::size_t agents;
    std::int64_t steps;
    int repetition;
    double wall_seconds;
};

/// Timing sweep over the threshold-trader model (the scaling workhorse):
/// one row per (agents, steps, repetition) combination.
std::vector<BenchRow> bench_cross(const std::vector<std::size_t>& agent_counts,
                                  const std::vector<std::int64_t>& step_counts,
                                  int repetitions, std::uint64_t master_seed);

}  // namespace abcem
