#include <numeric>

#include "abcem/runner.hpp"

namespace abcem {

namespace {

/// Presents several agent blocks as one population. Aggregates are sums
/// over the member blocks; updates fan out in block order.
class CompositePopulation final : public AgentPopulation {
public:
    explicit CompositePopulation(std::vector<AgentPopulation*> blocks)
        : blocks_(std::move(blocks)) {
        traits_ = {.decision_mean = true, .traded_volume = true, .clearance_mismatch = true};
        for (const AgentPopulation* block : blocks_) {
            const PopulationTraits t = block->traits();
            traits_.decision_mean &= t.decision_mean;
            traits_.traded_volume &= t.traded_volume;
            traits_.clearance_mismatch &= t.clearance_mismatch;
            size_ += block->size();
        }
    }

    std::size_t size() const override { return size_; }
    PopulationTraits traits() const override { return traits_; }

    void begin_step(const MarketState& market, RandomGenerator& rng) override {
        for (AgentPopulation* block : blocks_) block->begin_step(market, rng);
    }
    void update(const MarketState& market, RandomGenerator& rng) override {
        for (AgentPopulation* block : blocks_) block->update(market, rng);
    }
    double initial_excess_demand() const override {
        double weighted = 0.0;
        for (const AgentPopulation* block : blocks_)
            weighted += block->initial_excess_demand() * static_cast<double>(block->size());
        return weighted / static_cast<double>(size_);
    }
    double decision_sum() const override {
        double sum = 0.0;
        for (const AgentPopulation* block : blocks_) sum += block->decision_sum();
        return sum;
    }
    double signed_volume_sum() const override {
        double sum = 0.0;
        for (const AgentPopulation* block : blocks_) sum += block->signed_volume_sum();
        return sum;
    }
    double clearance_mismatch(double candidate_price) override {
        double sum = 0.0;
        for (AgentPopulation* block : blocks_) sum += block->clearance_mismatch(candidate_price);
        return sum;
    }
    void record(Recorder& recorder) const override {
        for (const AgentPopulation* block : blocks_) block->record(recorder);
    }
    void record_snapshots(Recorder& recorder) const override {
        for (const AgentPopulation* block : blocks_) block->record_snapshots(recorder);
    }
    std::vector<std::string> observable_names() const override {
        std::vector<std::string> names;
        for (const AgentPopulation* block : blocks_) {
            auto block_names = block->observable_names();
            names.insert(names.end(), block_names.begin(), block_names.end());
        }
        return names;
    }

private:
    std::vector<AgentPopulation*> blocks_;
    PopulationTraits traits_;
    std::size_t size_ = 0;
};

std::unique_ptr<AgentPopulation> build_block(const AgentBlock& block, const RunPlan& plan,
                                             double initial_price, RandomGenerator& rng) {
    return std::visit(
        [&](const auto& config) -> std::unique_ptr<AgentPopulation> {
            using T = std::decay_t<decltype(config)>;
            if constexpr (std::is_same_v<T, CrossAgentConfig>) {
                return std::make_unique<CrossPopulation>(config.count, config.params,
                                                         initial_price, plan.delta_t, rng);
            } else if constexpr (std::is_same_v<T, LlsAgentConfig>) {
                return std::make_unique<LlsPopulation>(config.params, initial_price,
                                                       plan.delta_t, rng);
            } else {
                return std::make_unique<HarrasPopulation>(config.count, config.params, rng);
            }
        },
        block);
}

std::unique_ptr<PriceCalculator> build_price_calculator(const PriceRuleSpec& spec) {
    switch (spec.kind) {
        case PriceRuleKind::CrossExponential:
            return std::make_unique<CrossPriceCalculator>(spec.initial_price, *spec.theta,
                                                          *spec.market_depth);
        case PriceRuleKind::GeneralSde:
            return std::make_unique<GeneralSdePriceCalculator>(
                spec.initial_price, spec.drift, spec.diffusion, *spec.theta,
                spec.market_depth.value_or(1.0));
        case PriceRuleKind::HarrasLog:
            return std::make_unique<HarrasPriceCalculator>(spec.initial_price);
        case PriceRuleKind::BisectionRational:
            return std::make_unique<BisectionPriceCalculator>(spec.initial_price,
                                                              spec.bisection);
    }
    throw ConfigError("", "unreachable price calculator kind");
}

}  // namespace

Assembly assemble(const SimulationConfig& config, std::uint64_t run_seed) {
    validate_assembly(config);
    Assembly assembly;
    GeneratorSpec rng_spec = config.rng;
    rng_spec.seed = run_seed;
    assembly.rng = make_generator(rng_spec);

    for (const AgentBlock& block : config.agents)
        assembly.blocks.push_back(
            build_block(block, config.plan, config.price.initial_price, *assembly.rng));
    if (assembly.blocks.size() == 1) {
        assembly.population = assembly.blocks.front().get();
    } else {
        std::vector<AgentPopulation*> views;
        for (const auto& block : assembly.blocks) views.push_back(block.get());
        assembly.composite = std::make_unique<CompositePopulation>(std::move(views));
        assembly.population = assembly.composite.get();
    }

    switch (config.ed_kind) {
        case EdCalculatorKind::MeanDecision:
            assembly.ed_calc = std::make_unique<MeanDecisionExcessDemand>();
            break;
        case EdCalculatorKind::Volume: {
            double depth = 0.0;
            for (const AgentBlock& block : config.agents)
                if (const auto* harras = std::get_if<HarrasAgentConfig>(&block))
                    depth = harras->params.market_depth;
            assembly.ed_calc = std::make_unique<VolumeExcessDemand>(depth);
            break;
        }
        case EdCalculatorKind::Clearance:
            assembly.ed_calc = std::make_unique<ClearanceExcessDemand>();
            break;
    }
    assembly.price_calc = build_price_calculator(config.price);
    return assembly;
}

}  // namespace abcem
