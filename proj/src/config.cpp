#include "abcem/config.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <limits>
#include <fstream>
#include <sstream>

namespace abcem {

namespace {

namespace pt = boost::property_tree;

double to_double(const std::string& path, const std::string& raw) {
    double value{};
    const char* begin = raw.data();
    const char* end = raw.data() + raw.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ConfigError(path, "expected a number, got \"" + raw + "\"");
    return value;
}

std::int64_t to_integer(const std::string& path, const std::string& raw) {
    std::int64_t value{};
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc{} || ptr != raw.data() + raw.size())
        throw ConfigError(path, "expected an integer, got \"" + raw + "\"");
    return value;
}

std::uint64_t to_unsigned(const std::string& path, const std::string& raw) {
    std::uint64_t value{};
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc{} || ptr != raw.data() + raw.size())
        throw ConfigError(path, "expected an unsigned integer, got \"" + raw + "\"");
    return value;
}

/// Strict view of one element: typed accessors and rejection of elements
/// that no block claims.
class Node {
public:
    Node(const pt::ptree& tree, std::string path) : tree_(&tree), path_(std::move(path)) {}

    const std::string& path() const { return path_; }

    bool has(const std::string& key) const { return tree_->find(key) != tree_->not_found(); }

    Node child(const std::string& key) const {
        const auto it = tree_->find(key);
        if (it == tree_->not_found())
            throw ConfigError(path_, "missing required element <" + key + ">");
        return {it->second, path_ + "." + key};
    }

    std::vector<Node> children(const std::string& key) const {
        std::vector<Node> result;
        int index = 0;
        for (const auto& [name, sub] : *tree_) {
            if (name == key)
                result.emplace_back(sub, path_ + "." + key + "[" + std::to_string(index++) + "]");
        }
        return result;
    }

    std::string text(const std::string& key) const {
        const auto it = tree_->find(key);
        if (it == tree_->not_found())
            throw ConfigError(path_, "missing required element <" + key + ">");
        return it->second.get_value<std::string>();
    }

    std::string value() const { return tree_->get_value<std::string>(); }

    std::string text_or(const std::string& key, const std::string& fallback) const {
        return has(key) ? text(key) : fallback;
    }

    double number(const std::string& key) const { return to_double(path_ + "." + key, text(key)); }
    double number_or(const std::string& key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }
    std::int64_t integer(const std::string& key) const {
        return to_integer(path_ + "." + key, text(key));
    }
    std::int64_t integer_or(const std::string& key, std::int64_t fallback) const {
        return has(key) ? integer(key) : fallback;
    }
    std::uint64_t unsigned_integer(const std::string& key) const {
        return to_unsigned(path_ + "." + key, text(key));
    }

    void expect_keys(std::initializer_list<std::string_view> allowed) const {
        for (const auto& [name, sub] : *tree_) {
            (void)sub;
            if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
                throw ConfigError(path_, "unknown element <" + name + ">");
        }
    }

private:
    const pt::ptree* tree_;
    std::string path_;
};

RunPlan parse_run_plan(const Node& node) {
    node.expect_keys({"numSteps", "deltaT", "repetitions", "masterSeed"});
    RunPlan plan;
    plan.num_steps = node.integer("numSteps");
    if (plan.num_steps < 0) throw ConfigError(node.path(), "numSteps must be non-negative");
    plan.delta_t = node.number("deltaT");
    if (!(plan.delta_t > 0)) throw ConfigError(node.path(), "deltaT must be positive");
    plan.repetitions = node.integer_or("repetitions", 1);
    if (plan.repetitions < 1) throw ConfigError(node.path(), "repetitions must be >= 1");
    plan.master_seed = node.unsigned_integer("masterSeed");
    return plan;
}

GeneratorSpec parse_rng(const Node& node) {
    node.expect_keys({"rngClass", "mode", "poolSize"});
    GeneratorSpec spec;
    const std::string cls = node.text("rngClass");
    if (cls != "MersenneTwister64")
        throw ConfigError(node.path() + ".rngClass", "unknown generator \"" + cls + "\"");
    spec.algorithm = RngAlgorithm::MersenneTwister64;
    spec.seed = 0;  // seeded per run from the run plan
    const std::string mode = node.text("mode");
    if (mode == "on-the-fly") {
        spec.mode = RngMode::OnTheFly;
        if (node.has("poolSize"))
            throw ConfigError(node.path(), "poolSize is only meaningful in pooled mode");
    } else if (mode == "pooled") {
        spec.mode = RngMode::Pooled;
        const std::int64_t size = node.integer("poolSize");
        if (size < 1) throw ConfigError(node.path() + ".poolSize", "poolSize must be >= 1");
        spec.pool_size = static_cast<std::size_t>(size);
    } else {
        throw ConfigError(node.path() + ".mode",
                          "expected \"on-the-fly\" or \"pooled\", got \"" + mode + "\"");
    }
    return spec;
}

AgentBlock parse_cross_agents(const Node& node) {
    node.expect_keys({"agentClass", "count", "A1", "A2", "b1", "b2", "wealth"});
    CrossAgentConfig config;
    const std::int64_t count = node.integer("count");
    if (count < 1) throw ConfigError(node.path() + ".count", "count must be >= 1");
    config.count = static_cast<std::size_t>(count);
    config.params.a1 = node.number("A1");
    config.params.a2 = node.number("A2");
    config.params.b1 = node.number("b1");
    config.params.b2 = node.number("b2");
    if (!(config.params.a1 > 0 && config.params.a1 < config.params.a2))
        throw ConfigError(node.path(), "inaction thresholds require 0 < A1 < A2");
    if (!(config.params.b1 > 0 && config.params.b1 < config.params.b2))
        throw ConfigError(node.path(), "herding thresholds require 0 < b1 < b2");
    if (node.has("wealth")) {
        const Node wealth = node.child("wealth");
        wealth.expect_keys({"interestRate", "gamma", "initialWealth"});
        config.params.wealth_enabled = true;
        config.params.interest_rate = wealth.number("interestRate");
        config.params.stock_fraction = wealth.number("gamma");
        config.params.initial_wealth = wealth.number_or("initialWealth", 1.0);
        if (!(config.params.stock_fraction > 0 && config.params.stock_fraction <= 1))
            throw ConfigError(wealth.path(), "gamma must lie in (0, 1]");
        if (!(config.params.initial_wealth > 0))
            throw ConfigError(wealth.path(), "initialWealth must be positive");
    }
    return config;
}

AgentBlock parse_lls_agents(const Node& node) {
    node.expect_keys({"agentClass", "groups", "sigmaGamma", "interestRate", "z1", "z2",
                      "historyMean", "historySigma", "scalingMode", "returnDenominator",
                      "initialWealth", "initialShares", "initialGamma", "initialDividend",
                      "noiseTruncation"});
    LlsAgentConfig config;
    auto& p = config.params;
    const Node groups = node.child("groups");
    groups.expect_keys({"group"});
    for (const Node& group : groups.children("group")) {
        group.expect_keys({"count", "memory"});
        LlsGroupSpec spec;
        const std::int64_t count = group.integer("count");
        if (count < 1) throw ConfigError(group.path() + ".count", "count must be >= 1");
        spec.count = static_cast<std::size_t>(count);
        spec.memory = group.number("memory");
        if (!(spec.memory > 0)) throw ConfigError(group.path() + ".memory", "memory must be positive");
        p.groups.push_back(spec);
    }
    if (p.groups.empty()) throw ConfigError(groups.path(), "at least one group is required");
    p.sigma_gamma = node.number("sigmaGamma");
    if (p.sigma_gamma < 0) throw ConfigError(node.path() + ".sigmaGamma", "must be >= 0");
    p.interest_rate = node.number("interestRate");
    p.z1 = node.number("z1");
    p.z2 = node.number("z2");
    if (!(p.z1 <= p.z2)) throw ConfigError(node.path(), "dividend growth requires z1 <= z2");
    p.mu_history = node.number("historyMean");
    p.sigma_history = node.number("historySigma");
    if (p.sigma_history < 0) throw ConfigError(node.path() + ".historySigma", "must be >= 0");
    const std::string scaling = node.text_or("scalingMode", "fixed-memory");
    if (scaling == "fixed-memory")
        p.scaling = MemoryScaling::FixedMemory;
    else if (scaling == "scaled-memory")
        p.scaling = MemoryScaling::ScaledMemory;
    else
        throw ConfigError(node.path() + ".scalingMode",
                          "expected \"fixed-memory\" or \"scaled-memory\", got \"" + scaling + "\"");
    const std::string denom = node.text_or("returnDenominator", "current-price");
    if (denom == "current-price")
        p.denominator = ReturnDenominator::CurrentPrice;
    else if (denom == "previous-price")
        p.denominator = ReturnDenominator::PreviousPrice;
    else
        throw ConfigError(node.path() + ".returnDenominator",
                          "expected \"current-price\" or \"previous-price\", got \"" + denom + "\"");
    p.initial_wealth = node.number_or("initialWealth", 1000.0);
    p.initial_shares = node.number_or("initialShares", 100.0);
    p.initial_gamma = node.number_or("initialGamma", 0.4);
    p.initial_dividend = node.number("initialDividend");
    p.noise_truncation = node.number_or("noiseTruncation", 2.0);
    if (p.noise_truncation < 0)
        throw ConfigError(node.path() + ".noiseTruncation",
                          "must be positive, or 0 to truncate into the admissible interval");
    return config;
}

AgentBlock parse_harras_agents(const Node& node) {
    node.expect_keys({"agentClass", "count", "C1", "C2", "C3", "Omega", "g", "alpha", "lambda",
                      "opinionVariant"});
    HarrasAgentConfig config;
    const std::int64_t count = node.integer("count");
    if (count < 1) throw ConfigError(node.path() + ".count", "count must be >= 1");
    config.count = static_cast<std::size_t>(count);
    auto& p = config.params;
    p.c1_max = node.number("C1");
    p.c2_max = node.number("C2");
    p.c3_max = node.number("C3");
    p.omega = node.number("Omega");
    if (p.c1_max < 0 || p.c2_max < 0 || p.c3_max < 0 || p.omega < 0)
        throw ConfigError(node.path(), "weight and threshold ranges must be non-negative");
    p.trade_fraction = node.number("g");
    if (!(p.trade_fraction > 0 && p.trade_fraction < 1))
        throw ConfigError(node.path() + ".g", "trade fraction must lie in (0, 1)");
    p.alpha = node.number("alpha");
    if (!(p.alpha > 0 && p.alpha < 1))
        throw ConfigError(node.path() + ".alpha", "must lie in (0, 1)");
    p.market_depth = node.number("lambda");
    if (!(p.market_depth > 0)) throw ConfigError(node.path() + ".lambda", "must be positive");
    const std::string variant = node.text_or("opinionVariant", "neighbor-mean");
    if (variant == "neighbor-mean")
        p.opinion = OpinionMode::NeighborMean;
    else if (variant == "neighbor-sum")
        p.opinion = OpinionMode::NeighborSum;
    else
        throw ConfigError(node.path() + ".opinionVariant",
                          "expected \"neighbor-mean\" or \"neighbor-sum\", got \"" + variant + "\"");
    return config;
}

AgentBlock parse_agent_block(const Node& node) {
    const std::string cls = node.text("agentClass");
    if (cls == "AgentCross") return parse_cross_agents(node);
    if (cls == "AgentLLS") return parse_lls_agents(node);
    if (cls == "AgentHarras") return parse_harras_agents(node);
    throw ConfigError(node.path() + ".agentClass", "unknown agent class \"" + cls + "\"");
}

EdCalculatorKind parse_ed_calculator(const Node& node) {
    node.expect_keys({"excessDemandCalculatorClass"});
    const std::string cls = node.text("excessDemandCalculatorClass");
    if (cls == "ExcessDemandCalculatorMean") return EdCalculatorKind::MeanDecision;
    if (cls == "ExcessDemandCalculatorVolume") return EdCalculatorKind::Volume;
    if (cls == "ExcessDemandCalculatorClearance") return EdCalculatorKind::Clearance;
    throw ConfigError(node.path() + ".excessDemandCalculatorClass",
                      "unknown excess-demand calculator \"" + cls + "\"");
}

PriceRuleSpec parse_price_rule(const Node& node) {
    PriceRuleSpec spec;
    const std::string cls = node.text("priceCalculatorClass");
    spec.initial_price = node.number("initialPrice");
    if (!(spec.initial_price > 0))
        throw ConfigError(node.path() + ".initialPrice", "must be positive");
    if (cls == "PriceCalculatorCross") {
        node.expect_keys({"priceCalculatorClass", "initialPrice", "theta", "marketDepth"});
        spec.kind = PriceRuleKind::CrossExponential;
        spec.theta = node.number("theta");
        spec.market_depth = node.number("marketDepth");
    } else if (cls == "PriceCalculatorGeneral") {
        node.expect_keys({"priceCalculatorClass", "initialPrice", "theta", "drift", "diffusion",
                          "marketDepth"});
        spec.kind = PriceRuleKind::GeneralSde;
        spec.theta = node.number("theta");
        const std::string drift = node.text("drift");
        if (drift == "ed-derivative") {
            spec.drift = DriftKind::EdDerivative;
            spec.market_depth = node.number("marketDepth");
            if (!(*spec.market_depth > 0))
                throw ConfigError(node.path() + ".marketDepth", "must be positive");
        } else if (drift == "ed-level") {
            spec.drift = DriftKind::EdLevel;
            if (node.has("marketDepth")) spec.market_depth = node.number("marketDepth");
        } else
            throw ConfigError(node.path() + ".drift",
                              "expected \"ed-derivative\" or \"ed-level\", got \"" + drift + "\"");
        const std::string diffusion = node.text_or("diffusion", "ed-heteroskedastic");
        if (diffusion == "ed-heteroskedastic")
            spec.diffusion = DiffusionKind::EdHeteroskedastic;
        else if (diffusion == "none")
            spec.diffusion = DiffusionKind::None;
        else
            throw ConfigError(node.path() + ".diffusion",
                              "expected \"ed-heteroskedastic\" or \"none\", got \"" + diffusion +
                                  "\"");
    } else if (cls == "PriceCalculatorHarras") {
        node.expect_keys({"priceCalculatorClass", "initialPrice"});
        spec.kind = PriceRuleKind::HarrasLog;
    } else if (cls == "PriceCalculatorBisection") {
        node.expect_keys({"priceCalculatorClass", "initialPrice", "epsilon", "maxIterations",
                          "lowerBound", "upperBound", "theta", "marketDepth"});
        spec.kind = PriceRuleKind::BisectionRational;
        spec.bisection.epsilon = node.number("epsilon");
        const std::int64_t iterations = node.integer("maxIterations");
        if (iterations < 1 || iterations > std::numeric_limits<int>::max())
            throw ConfigError(node.path() + ".maxIterations", "must be a positive integer");
        spec.bisection.max_iterations = static_cast<int>(iterations);
        spec.bisection.lower_bound = node.number("lowerBound");
        spec.bisection.upper_bound = node.number("upperBound");
        if (!(spec.bisection.epsilon > 0))
            throw ConfigError(node.path() + ".epsilon", "must be positive");
        if (!(spec.bisection.lower_bound > 0 &&
              spec.bisection.lower_bound < spec.bisection.upper_bound))
            throw ConfigError(node.path(), "bounds require 0 < lowerBound < upperBound");
        if (node.has("theta")) spec.theta = node.number("theta");
        if (node.has("marketDepth")) spec.market_depth = node.number("marketDepth");
    } else {
        throw ConfigError(node.path() + ".priceCalculatorClass",
                          "unknown price calculator \"" + cls + "\"");
    }
    return spec;
}

OutputSpec parse_output(const Node& node) {
    node.expect_keys({"format", "destination"});
    OutputSpec spec;
    const std::string format = node.text("format");
    if (format == "csv")
        spec.format = OutputFormat::CsvDirectory;
    else if (format == "container")
        spec.format = OutputFormat::ContainerFile;
    else
        throw ConfigError(node.path() + ".format",
                          "expected \"csv\" or \"container\", got \"" + format + "\"");
    spec.destination = node.text("destination");
    if (spec.destination.empty())
        throw ConfigError(node.path() + ".destination", "must not be empty");
    return spec;
}

pt::ptree read_tree(const std::string& xml_text) {
    std::istringstream stream(xml_text);
    pt::ptree tree;
    try {
        pt::read_xml(stream, tree,
                     pt::xml_parser::trim_whitespace | pt::xml_parser::no_comments);
    } catch (const pt::xml_parser_error& err) {
        throw ConfigError("", std::string("malformed XML: ") + err.what());
    }
    return tree;
}

std::string write_tree(const pt::ptree& tree) {
    std::ostringstream stream;
    pt::write_xml(stream, tree,
                  pt::xml_writer_settings<std::string>(' ', 4));
    return stream.str();
}

}  // namespace

std::size_t agent_block_count(const AgentBlock& block) {
    return std::visit(
        [](const auto& config) -> std::size_t {
            using T = std::decay_t<decltype(config)>;
            if constexpr (std::is_same_v<T, LlsAgentConfig>) {
                std::size_t total = 0;
                for (const auto& group : config.params.groups) total += group.count;
                return total;
            } else {
                return config.count;
            }
        },
        block);
}

std::string agent_block_class(const AgentBlock& block) {
    if (std::holds_alternative<CrossAgentConfig>(block)) return "AgentCross";
    if (std::holds_alternative<LlsAgentConfig>(block)) return "AgentLLS";
    return "AgentHarras";
}

PopulationTraits agent_block_traits(const AgentBlock& block) {
    if (std::holds_alternative<CrossAgentConfig>(block)) return {.decision_mean = true};
    if (std::holds_alternative<LlsAgentConfig>(block)) return {.clearance_mismatch = true};
    return {.decision_mean = true, .traded_volume = true};
}

SimulationConfig parse_config_text(const std::string& xml_text) {
    const pt::ptree tree = read_tree(xml_text);
    const auto root_it = tree.find("simulation");
    if (root_it == tree.not_found())
        throw ConfigError("", "missing root element <simulation>");
    Node root(root_it->second, "simulation");
    root.expect_keys({"runPlan", "rngSettings", "agents", "excessDemandCalculatorSettings",
                      "priceCalculatorSettings", "outputSettings", "recording"});

    SimulationConfig config;
    config.source_text = xml_text;
    config.plan = parse_run_plan(root.child("runPlan"));
    config.rng = parse_rng(root.child("rngSettings"));

    const Node agents = root.child("agents");
    agents.expect_keys({"agentSettings"});
    for (const Node& block : agents.children("agentSettings"))
        config.agents.push_back(parse_agent_block(block));
    if (config.agents.empty())
        throw ConfigError(agents.path(), "at least one agentSettings block is required");

    config.ed_kind = parse_ed_calculator(root.child("excessDemandCalculatorSettings"));
    config.price = parse_price_rule(root.child("priceCalculatorSettings"));
    config.output = parse_output(root.child("outputSettings"));

    if (root.has("recording")) {
        const Node recording = root.child("recording");
        recording.expect_keys({"observable"});
        std::set<std::string> selection;
        for (const Node& observable : recording.children("observable"))
            selection.insert(observable.value());
        config.recording = std::move(selection);
    }
    validate_assembly(config);
    return config;
}

SimulationConfig parse_config(const std::string& path) {
    std::ifstream stream(path, std::ios::binary);
    if (!stream) throw ConfigError("", "cannot read config file \"" + path + "\"");
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    return parse_config_text(buffer.str());
}

void validate_assembly(const SimulationConfig& config) {
    const std::string ed_path = "simulation.excessDemandCalculatorSettings";
    const std::string price_path = "simulation.priceCalculatorSettings";
    for (const AgentBlock& block : config.agents) {
        const PopulationTraits traits = agent_block_traits(block);
        const std::string cls = agent_block_class(block);
        switch (config.ed_kind) {
            case EdCalculatorKind::MeanDecision:
                if (!traits.decision_mean)
                    throw ConfigError(ed_path, "ExcessDemandCalculatorMean requires agents with "
                                               "a decision mean; " +
                                                   cls + " provides none");
                break;
            case EdCalculatorKind::Volume:
                if (!traits.traded_volume)
                    throw ConfigError(ed_path, "ExcessDemandCalculatorVolume requires agents "
                                               "with trading volumes; " +
                                                   cls + " provides none");
                break;
            case EdCalculatorKind::Clearance:
                if (!traits.clearance_mismatch)
                    throw ConfigError(ed_path, "ExcessDemandCalculatorClearance requires "
                                               "bisection-capable agents; " +
                                                   cls + " is not");
                break;
        }
        if (config.price.kind == PriceRuleKind::BisectionRational && !traits.clearance_mismatch)
            throw ConfigError(price_path, "PriceCalculatorBisection requires bisection-capable "
                                          "agents; " +
                                              cls + " is not");
    }
    if (config.ed_kind == EdCalculatorKind::Volume) {
        double depth = 0.0;
        for (const AgentBlock& block : config.agents) {
            const auto* harras = std::get_if<HarrasAgentConfig>(&block);
            if (!harras) continue;
            if (depth == 0.0)
                depth = harras->params.market_depth;
            else if (depth != harras->params.market_depth)
                throw ConfigError(ed_path, "volume aggregation requires one market depth; "
                                           "agent blocks disagree");
        }
    }
    if (config.recording) {
        std::set<std::string> offered;
        for (const AgentBlock& block : config.agents) {
            if (const auto* lls = std::get_if<LlsAgentConfig>(&block)) {
                for (std::size_t g = 0; g < lls->params.groups.size(); ++g) {
                    offered.insert("group_wealth_" + std::to_string(g));
                    offered.insert("gamma_star_" + std::to_string(g));
                }
                offered.insert({"boundary_fraction", "total_shares", "dividend"});
            } else if (const auto* cross = std::get_if<CrossAgentConfig>(&block)) {
                if (cross->params.wealth_enabled) offered.insert({"mean_wealth", "final_wealth"});
            }
        }
        for (const std::string& name : *config.recording) {
            if (!offered.count(name))
                throw ConfigError("simulation.recording",
                                  "observable \"" + name + "\" is not offered by this assembly");
        }
    }
}

std::string override_config_values(
    const std::string& xml_text,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
    pt::ptree tree = read_tree(xml_text);
    const auto root_it = tree.find("simulation");
    if (root_it == tree.not_found())
        throw ConfigError("", "missing root element <simulation>");
    for (const auto& [path, value] : overrides) {
        if (!root_it->second.get_child_optional(pt::path(path))) {
            // allow introducing an optional leaf, but only under an existing block
            const auto dot = path.rfind('.');
            if (dot == std::string::npos ||
                !root_it->second.get_child_optional(pt::path(path.substr(0, dot))))
                throw ConfigError("simulation." + path, "override path does not exist");
        }
        root_it->second.put(pt::path(path), value);
    }
    return write_tree(tree);
}

std::vector<SimulationConfig> expand_sweep(const std::string& base_xml_text,
                                           std::vector<SweepParam> params) {
    if (params.empty()) throw ConfigError("", "sweep requires at least one parameter");
    std::sort(params.begin(), params.end(),
              [](const SweepParam& a, const SweepParam& b) { return a.path < b.path; });
    for (const SweepParam& param : params)
        if (param.values.empty())
            throw ConfigError("", "sweep parameter \"" + param.path + "\" has no values");
    std::vector<SimulationConfig> configs;
    std::vector<std::size_t> odometer(params.size(), 0);
    while (true) {
        std::vector<std::pair<std::string, std::string>> overrides;
        for (std::size_t i = 0; i < params.size(); ++i)
            overrides.emplace_back(params[i].path, params[i].values[odometer[i]]);
        configs.push_back(parse_config_text(override_config_values(base_xml_text, overrides)));
        std::size_t digit = params.size();
        while (digit-- > 0) {
            if (++odometer[digit] < params[digit].values.size()) break;
            odometer[digit] = 0;
            if (digit == 0) return configs;
        }
    }
}

}  // namespace abcem
