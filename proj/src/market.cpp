#include "abcem/market.hpp"

#include <algorithm>
#include <cmath>

namespace abcem {

double mean_excess_demand(std::span<const double> microscopic) {
    if (microscopic.empty()) throw MarketError("excess demand of an empty population");
    double sum = 0.0;
    for (double ed : microscopic) sum += ed;
    return sum / static_cast<double>(microscopic.size());
}

double volume_weighted_excess_demand(std::span<const double> signed_volumes,
                                     double market_depth) {
    if (signed_volumes.empty()) throw MarketError("excess demand of an empty population");
    if (!(market_depth > 0)) throw MarketError("market depth must be positive");
    double sum = 0.0;
    for (double v : signed_volumes) sum += v;
    return sum / (market_depth * static_cast<double>(signed_volumes.size()));
}

double price_cross_exponential(double price, const ExcessDemandView& ed, double theta,
                               double kappa, double delta_t, double eta) {
    const double diffusion = (1.0 + theta * std::abs(ed.current)) * std::sqrt(delta_t) * eta;
    return price * std::exp(diffusion + kappa * ed.delta());
}

double evaluate_diffusion_cross(double price, double excess_demand, double theta) {
    return price * (1.0 + theta * std::abs(excess_demand));
}

double price_general_sde(double price, double drift, double diffusion, double delta_t,
                         double eta) {
    return price + delta_t * drift + std::sqrt(delta_t) * diffusion * eta;
}

double price_harras_log(double price, double excess_demand) {
    return price * std::exp(excess_demand);
}

double solve_rational_price(const std::function<double(double)>& mismatch, double lower,
                            double upper, double epsilon, int max_iterations) {
    if (!(lower < upper)) throw MarketError("bisection bracket requires lower < upper");
    if (!(epsilon > 0)) throw MarketError("bisection epsilon must be positive");
    double flo = mismatch(lower);
    double fhi = mismatch(upper);
    if (!std::isfinite(flo) || !std::isfinite(fhi))
        throw MarketError("clearance mismatch is not finite on the bracket");
    if (std::abs(flo) < epsilon) return lower;
    if (std::abs(fhi) < epsilon) return upper;
    if ((flo < 0) == (fhi < 0))
        throw MarketError("no sign change on bracket [" + std::to_string(lower) + ", " +
                          std::to_string(upper) + "]");
    for (int iter = 0; iter < max_iterations; ++iter) {
        const double mid = 0.5 * (lower + upper);
        const double fmid = mismatch(mid);
        if (!std::isfinite(fmid)) throw MarketError("clearance mismatch is not finite");
        if (std::abs(fmid) < epsilon) return mid;
        if ((fmid < 0) == (flo < 0)) {
            lower = mid;
            flo = fmid;
        } else {
            upper = mid;
        }
        // flat-plateau termination: the bracket is machine-resolved
        if (upper - lower <= 1e-12 * std::max(1.0, std::abs(mid))) return mid;
    }
    throw MarketError("bisection did not converge within max_iterations");
}

void MeanDecisionExcessDemand::check_compatible(const AgentPopulation& population) const {
    if (!population.traits().decision_mean)
        throw EngineError(
            "ExcessDemandCalculatorMean requires agents exposing a decision mean");
}

VolumeExcessDemand::VolumeExcessDemand(double market_depth) : market_depth_(market_depth) {
    if (!(market_depth > 0)) throw MarketError("market depth must be positive");
}

double VolumeExcessDemand::compute(AgentPopulation& population, const MarketState&) const {
    return population.signed_volume_sum() /
           (market_depth_ * static_cast<double>(population.size()));
}

void VolumeExcessDemand::check_compatible(const AgentPopulation& population) const {
    if (!population.traits().traded_volume)
        throw EngineError(
            "ExcessDemandCalculatorVolume requires agents exposing trading volumes");
}

void ClearanceExcessDemand::check_compatible(const AgentPopulation& population) const {
    if (!population.traits().clearance_mismatch)
        throw EngineError(
            "ExcessDemandCalculatorClearance requires bisection-capable agents");
}

CrossPriceCalculator::CrossPriceCalculator(double initial_price, double theta, double kappa)
    : initial_price_(initial_price), theta_(theta), kappa_(kappa) {
    if (!(initial_price > 0)) throw MarketError("initial price must be positive");
    if (theta < 0) throw MarketError("theta must be non-negative");
    if (!(kappa > 0)) throw MarketError("market depth must be positive");
}

double CrossPriceCalculator::compute(const MarketState& market, AgentPopulation&,
                                     RandomGenerator& rng) {
    const double eta = rng.next_normal(0.0, 1.0);
    return price_cross_exponential(market.price,
                                   {market.excess_demand, market.prev_excess_demand}, theta_,
                                   kappa_, market.clock.delta_t, eta);
}

GeneralSdePriceCalculator::GeneralSdePriceCalculator(double initial_price, DriftKind drift,
                                                     DiffusionKind diffusion, double theta,
                                                     double market_depth)
    : initial_price_(initial_price),
      drift_(drift),
      diffusion_(diffusion),
      theta_(theta),
      market_depth_(market_depth) {
    if (!(initial_price > 0)) throw MarketError("initial price must be positive");
    if (theta < 0) throw MarketError("theta must be non-negative");
    if (drift == DriftKind::EdDerivative && !(market_depth > 0))
        throw MarketError("the ed-derivative drift needs a positive market depth");
}

double GeneralSdePriceCalculator::compute(const MarketState& market, AgentPopulation&,
                                          RandomGenerator& rng) {
    const double dt = market.clock.delta_t;
    const double drift = drift_ == DriftKind::EdDerivative
                             ? market_depth_ * market.price * (market.delta_ed() / dt)
                             : market.price * market.excess_demand;
    double diffusion = 0.0;
    double eta = 0.0;
    if (diffusion_ == DiffusionKind::EdHeteroskedastic) {
        diffusion = evaluate_diffusion_cross(market.price, market.excess_demand, theta_);
        eta = rng.next_normal(0.0, 1.0);
    }
    return price_general_sde(market.price, drift, diffusion, dt, eta);
}

HarrasPriceCalculator::HarrasPriceCalculator(double initial_price)
    : initial_price_(initial_price) {
    if (!(initial_price > 0)) throw MarketError("initial price must be positive");
}

double HarrasPriceCalculator::compute(const MarketState& market, AgentPopulation&,
                                      RandomGenerator&) {
    return price_harras_log(market.price, market.excess_demand);
}

BisectionPriceCalculator::BisectionPriceCalculator(double initial_price,
                                                   const BisectionSettings& settings)
    : initial_price_(initial_price), settings_(settings) {
    if (!(initial_price > 0)) throw MarketError("initial price must be positive");
    if (!(settings.lower_bound > 0) || !(settings.lower_bound < settings.upper_bound))
        throw MarketError("bisection bounds require 0 < lowerBound < upperBound");
    if (!(settings.epsilon > 0)) throw MarketError("bisection epsilon must be positive");
    if (settings.max_iterations < 1) throw MarketError("maxIterations must be positive");
}

void BisectionPriceCalculator::check_compatible(const AgentPopulation& population) const {
    if (!population.traits().clearance_mismatch)
        throw EngineError("PriceCalculatorBisection requires bisection-capable agents (" +
                          std::string("rational market clearance unsupported)"));
}

double BisectionPriceCalculator::compute(const MarketState& market,
                                         AgentPopulation& population, RandomGenerator&) {
    const auto f = [&population](double s) { return population.clearance_mismatch(s); };
    const double cap_lo = settings_.lower_bound;
    const double cap_hi = settings_.upper_bound;
    double lo = std::clamp(market.price * 0.5, cap_lo, cap_hi);
    double hi = std::clamp(market.price * 2.0, cap_lo, cap_hi);
    if (!(lo < hi)) {
        lo = cap_lo;
        hi = cap_hi;
    }
    double flo = f(lo);
    double fhi = f(hi);
    if (std::abs(flo) < settings_.epsilon) return lo;
    if (std::abs(fhi) < settings_.epsilon) return hi;
    for (int expansion = 0; (flo < 0) == (fhi < 0); ++expansion) {
        if (expansion > 128)
            throw MarketError("no clearing price bracket found within bounds");
        if (flo > 0) {  // excess demand at both ends: the root lies above
            if (hi >= cap_hi)
                throw MarketError("no clearing price below upperBound " +
                                  std::to_string(cap_hi));
            lo = hi;
            flo = fhi;
            hi = std::min(hi * 2.0, cap_hi);
            fhi = f(hi);
        } else {  // excess supply at both ends: the root lies below
            if (lo <= cap_lo)
                throw MarketError("no clearing price above lowerBound " +
                                  std::to_string(cap_lo));
            hi = lo;
            fhi = flo;
            lo = std::max(lo * 0.5, cap_lo);
            flo = f(lo);
        }
        if (std::abs(flo) < settings_.epsilon) return lo;
        if (std::abs(fhi) < settings_.epsilon) return hi;
    }
    return solve_rational_price(f, lo, hi, settings_.epsilon, settings_.max_iterations);
}

}  // namespace abcem
