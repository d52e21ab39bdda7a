#pragma once

#include <functional>
#include <span>
#include <string>

#include "abcem/engine.hpp"

namespace abcem {

struct ExcessDemandView {
    double current = 0.0;
    double previous = 0.0;
    double delta() const { return current - previous; }
};

/// ED = (1/N) sum of microscopic excess demands. Throws for an empty span.
double mean_excess_demand(std::span<const double> microscopic);

/// ED = (1/(lambda N)) sum of decision_i * volume_i.
double volume_weighted_excess_demand(std::span<const double> signed_volumes,
                                     double market_depth);

/// S * exp((1 + theta |ED|) sqrt(dt) eta + kappa * dED). Strictly positive
/// for finite inputs.
double price_cross_exponential(double price, const ExcessDemandView& ed, double theta,
                               double kappa, double delta_t, double eta);

/// Heteroskedastic diffusion coefficient S (1 + theta |ED|).
double evaluate_diffusion_cross(double price, double excess_demand, double theta);

/// Euler-Maruyama step S + dt * drift + sqrt(dt) * diffusion * eta. The
/// caller is responsible for aborting on a non-positive result.
double price_general_sde(double price, double drift, double diffusion, double delta_t,
                         double eta);

/// S * exp(ED); log-price driven directly by excess demand.
double price_harras_log(double price, double excess_demand);

/// Bracketed bisection for the rational market. Converges when
/// |mismatch| < epsilon, or when the bracket width falls below 1e-12
/// relative (mismatch plateau). Throws MarketError when the bracket has no
/// sign change or max_iterations is exhausted.
double solve_rational_price(const std::function<double(double)>& mismatch, double lower,
                            double upper, double epsilon, int max_iterations);

class MarketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Excess-demand calculators

class MeanDecisionExcessDemand final : public ExcessDemandCalculator {
public:
    double compute(AgentPopulation& population, const MarketState&) const override {
        return population.decision_sum() / static_cast<double>(population.size());
    }
    void check_compatible(const AgentPopulation& population) const override;
    std::string name() const override { return "ExcessDemandCalculatorMean"; }
};

class VolumeExcessDemand final : public ExcessDemandCalculator {
public:
    explicit VolumeExcessDemand(double market_depth);
    double compute(AgentPopulation& population, const MarketState&) const override;
    void check_compatible(const AgentPopulation& population) const override;
    std::string name() const override { return "ExcessDemandCalculatorVolume"; }

private:
    double market_depth_;
};

class ClearanceExcessDemand final : public ExcessDemandCalculator {
public:
    double compute(AgentPopulation& population, const MarketState& market) const override {
        return population.clearance_mismatch(market.price) /
               static_cast<double>(population.size());
    }
    void check_compatible(const AgentPopulation& population) const override;
    std::string name() const override { return "ExcessDemandCalculatorClearance"; }
};

// ---------------------------------------------------------------------------
// Price calculators

class CrossPriceCalculator final : public PriceCalculator {
public:
    CrossPriceCalculator(double initial_price, double theta, double kappa);
    double compute(const MarketState& market, AgentPopulation&, RandomGenerator& rng) override;
    double initial_price() const override { return initial_price_; }
    std::string name() const override { return "PriceCalculatorCross"; }

private:
    double initial_price_, theta_, kappa_;
};

enum class DriftKind { EdDerivative, EdLevel };
enum class DiffusionKind { EdHeteroskedastic, None };

/// Euler-Maruyama pricing. The ed-derivative drift carries the market
/// depth (S' = S + dt kappa (dED/dt) S + ...), the linearization of the
/// exponential rule; without the depth factor a large one-step demand swing
/// can push the price non-positive. The ed-level drift is S * ED.
class GeneralSdePriceCalculator final : public PriceCalculator {
public:
    GeneralSdePriceCalculator(double initial_price, DriftKind drift, DiffusionKind diffusion,
                              double theta, double market_depth = 1.0);
    /// Consumes one normal draw per step unless the diffusion is None, in
    /// which case the step is a deterministic explicit Euler step.
    double compute(const MarketState& market, AgentPopulation&, RandomGenerator& rng) override;
    double initial_price() const override { return initial_price_; }
    std::string name() const override { return "PriceCalculatorGeneral"; }

private:
    double initial_price_;
    DriftKind drift_;
    DiffusionKind diffusion_;
    double theta_;
    double market_depth_;
};

class HarrasPriceCalculator final : public PriceCalculator {
public:
    explicit HarrasPriceCalculator(double initial_price);
    double compute(const MarketState& market, AgentPopulation&, RandomGenerator&) override;
    double initial_price() const override { return initial_price_; }
    std::string name() const override { return "PriceCalculatorHarras"; }

private:
    double initial_price_;
};

struct BisectionSettings {
    double epsilon = 0.1;
    int max_iterations = 10000;
    double lower_bound = 0.01;
    double upper_bound = 200.0;
};

/// Rational market: finds the price where the population's clearance
/// mismatch vanishes. The bracket is grown geometrically from the previous
/// price towards the sign change, capped by [lower_bound, upper_bound];
/// the mismatch is decreasing through the stable root, so the search walks
/// in the direction indicated by its sign.
class BisectionPriceCalculator final : public PriceCalculator {
public:
    BisectionPriceCalculator(double initial_price, const BisectionSettings& settings);
    double compute(const MarketState& market, AgentPopulation& population,
                   RandomGenerator&) override;
    void check_compatible(const AgentPopulation& population) const override;
    double initial_price() const override { return initial_price_; }
    std::string name() const override { return "PriceCalculatorBisection"; }

private:
    double initial_price_;
    BisectionSettings settings_;
};

}  // namespace abcem
