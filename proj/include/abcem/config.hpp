#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "abcem/agents_cross.hpp"
#include "abcem/agents_harras.hpp"
#include "abcem/agents_lls.hpp"
#include "abcem/market.hpp"
#include "abcem/rng.hpp"

namespace abcem {

/// Configuration failure with the offending element path, e.g.
/// "simulation.priceCalculatorSettings.epsilon".
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& path, const std::string& message)
        : std::runtime_error(path.empty() ? message : path + ": " + message), path_(path) {}
    const std::string& element_path() const { return path_; }

private:
    std::string path_;
};

struct RunPlan {
    std::int64_t num_steps = 0;
    double delta_t = 1.0;
    std::int64_t repetitions = 1;
    std::uint64_t master_seed = 0;
};

struct CrossAgentConfig {
    std::size_t count = 0;
    CrossParams params;
};

struct LlsAgentConfig {
    LlsParams params;
};

struct HarrasAgentConfig {
    std::size_t count = 0;
    HarrasParams params;
};

using AgentBlock = std::variant<CrossAgentConfig, LlsAgentConfig, HarrasAgentConfig>;

std::size_t agent_block_count(const AgentBlock& block);
std::string agent_block_class(const AgentBlock& block);
PopulationTraits agent_block_traits(const AgentBlock& block);

enum class EdCalculatorKind { MeanDecision, Volume, Clearance };

enum class PriceRuleKind { CrossExponential, GeneralSde, HarrasLog, BisectionRational };

struct PriceRuleSpec {
    PriceRuleKind kind = PriceRuleKind::CrossExponential;
    double initial_price = 1.0;
    std::optional<double> theta;
    std::optional<double> market_depth;  // kappa of the exponential rule
    DriftKind drift = DriftKind::EdDerivative;
    DiffusionKind diffusion = DiffusionKind::EdHeteroskedastic;
    BisectionSettings bisection;
};

enum class OutputFormat { CsvDirectory, ContainerFile };

struct OutputSpec {
    OutputFormat format = OutputFormat::CsvDirectory;
    std::string destination = "output";
};

struct SimulationConfig {
    RunPlan plan;
    GeneratorSpec rng;
    std::vector<AgentBlock> agents;
    EdCalculatorKind ed_kind = EdCalculatorKind::MeanDecision;
    PriceRuleSpec price;
    OutputSpec output;
    std::optional<std::set<std::string>> recording;  // absent: record everything offered
    std::string source_text;                         // verbatim text of this configuration
};

/// Parses and structurally validates an XML model assembly. Unknown
/// elements, missing required keys, and malformed values are reported with
/// their element path.
SimulationConfig parse_config_text(const std::string& xml_text);
SimulationConfig parse_config(const std::string& path);

/// Structural compatibility of the assembled blocks (capability tags); the
/// scientific sanity of a combination is deliberately not checked.
void validate_assembly(const SimulationConfig& config);

/// Returns the configuration text with the given dotted-path values
/// replaced, e.g. {"runPlan.masterSeed", "7"}. Paths are relative to the
/// root <simulation> element and address the first match.
std::string override_config_values(
    const std::string& xml_text,
    const std::vector<std::pair<std::string, std::string>>& overrides);

struct SweepParam {
    std::string path;
    std::vector<std::string> values;
};

/// Cartesian expansion of parameter lists into concrete configurations,
/// deterministic and lexicographically ordered (paths sorted, first path
/// slowest). Each result carries its own serialized source text.
std::vector<SimulationConfig> expand_sweep(const std::string& base_xml_text,
                                           std::vector<SweepParam> params);

}  // namespace abcem
