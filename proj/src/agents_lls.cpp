#include "abcem/agents_lls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace abcem {

double dividend_step(double dividend, double z1, double z2, double delta_t,
                     RandomGenerator& rng) {
    if (!(z1 <= z2)) throw std::invalid_argument("dividend growth requires z1 <= z2");
    if (!(1.0 + delta_t * z1 > 0))
        throw std::domain_error("dividend growth permits a non-positive dividend");
    const double z = z1 == z2 ? z1 : rng.next_uniform(z1, z2);
    return (1.0 + delta_t * z) * dividend;
}

double stock_return_x(double price, double prev_price, double dividend, double delta_t,
                      ReturnDenominator denominator) {
    const double denom = denominator == ReturnDenominator::CurrentPrice ? price : prev_price;
    return ((price - prev_price) / delta_t + dividend) / denom;
}

double expected_log_utility(double gamma, std::span<const double> window,
                            double interest_rate, double delta_t, double wealth) {
    if (window.empty()) throw std::invalid_argument("empty return window");
    const double bond = (1.0 - gamma) * wealth * (1.0 + interest_rate * delta_t);
    double sum = 0.0;
    for (double x : window) {
        const double arg = bond + gamma * wealth * (1.0 + x * delta_t);
        if (!(arg > 0)) throw std::domain_error("log utility of a non-positive wealth");
        sum += std::log(arg);
    }
    return sum / static_cast<double>(window.size());
}

double first_order_condition(double gamma, std::span<const double> window,
                             double interest_rate, double delta_t) {
    if (window.empty()) throw std::invalid_argument("empty return window");
    const double c = 1.0 + delta_t * interest_rate;
    double sum = 0.0;
    for (double x : window) {
        const double u = delta_t * (x - interest_rate);
        const double denom = u * gamma + c;
        if (!(denom > 0)) throw std::domain_error("utility derivative denominator vanished");
        sum += u / denom;
    }
    return sum / static_cast<double>(window.size());
}

double optimal_investment(std::span<const double> window, double interest_rate,
                          double delta_t) {
    const auto f = [&](double gamma) {
        return first_order_condition(gamma, window, interest_rate, delta_t);
    };
    const double f_lo = f(kGammaMin);
    if (f_lo <= 0) return kGammaMin;
    const double f_hi = f(kGammaMax);
    if (f_hi >= 0) return kGammaMax;
    // f decreases through zero: unique interior root
    double lo = kGammaMin, hi = kGammaMax;
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double boundary_decision_fraction(std::span<const double> gamma_stars) {
    if (gamma_stars.empty()) throw std::invalid_argument("no recorded decisions");
    std::size_t boundary = 0;
    for (double g : gamma_stars)
        if (g == kGammaMin || g == kGammaMax) ++boundary;
    return static_cast<double>(boundary) / static_cast<double>(gamma_stars.size());
}

double lls_wealth_update(double wealth, double gamma, double interest_rate, double x,
                         double delta_t) {
    const double next =
        wealth * (1.0 + delta_t * ((1.0 - gamma) * interest_rate + gamma * x));
    if (!(next > 0) || !std::isfinite(next))
        throw EngineError("wealth update left an agent with non-positive wealth");
    return next;
}

void LlsPopulation::init_agents(const LlsParams& params, double delta_t) {
    if (params.groups.empty()) throw std::invalid_argument("at least one agent group required");
    if (!(params.initial_wealth > 0) || !(params.initial_shares >= 0))
        throw std::invalid_argument("invalid initial wealth or shares");
    if (params.initial_gamma < kGammaMin || params.initial_gamma > kGammaMax)
        throw std::invalid_argument("initial investment fraction outside [0.01, 0.99]");
    if (!(params.initial_dividend > 0))
        throw std::invalid_argument("initial dividend must be positive");
    if (params.sigma_gamma < 0) throw std::invalid_argument("sigma_gamma must be >= 0");
    delta_t_ = delta_t;
    std::size_t total = 0;
    group_offset_.push_back(0);
    for (const auto& group : params.groups) {
        if (group.count == 0) throw std::invalid_argument("empty agent group");
        std::size_t steps;
        if (params.scaling == MemoryScaling::ScaledMemory)
            steps = static_cast<std::size_t>(
                std::max<long long>(1, std::llround(group.memory / delta_t)));
        else
            steps = static_cast<std::size_t>(std::max<long long>(1, std::llround(group.memory)));
        memory_steps_.push_back(steps);
        total += group.count;
        group_offset_.push_back(total);
        for (std::size_t i = 0; i < group.count; ++i)
            group_of_.push_back(static_cast<int>(memory_steps_.size() - 1));
    }
    wealth_.assign(total, params.initial_wealth);
    shares_.assign(total, params.initial_shares);
    gamma_.assign(total, params.initial_gamma);
    pending_gamma_ = gamma_;
    gamma_star_.assign(params.groups.size(), std::numeric_limits<double>::quiet_NaN());
    total_shares_ = params.initial_shares * static_cast<double>(total);
    dividend_ = params.initial_dividend;
}

LlsPopulation::LlsPopulation(const LlsParams& params, double initial_price, double delta_t,
                             RandomGenerator& rng)
    : params_(params) {
    init_agents(params, delta_t);
    prev_price_ = initial_price;
    const std::size_t depth = *std::max_element(memory_steps_.begin(), memory_steps_.end());
    history_.reserve(depth);
    for (std::size_t i = 0; i < depth; ++i)
        history_.push_back(rng.next_normal(params.mu_history, params.sigma_history));
}

LlsPopulation::LlsPopulation(const LlsParams& params, double initial_price, double delta_t,
                             std::vector<double> history)
    : params_(params), history_(std::move(history)) {
    init_agents(params, delta_t);
    prev_price_ = initial_price;
    const std::size_t depth = *std::max_element(memory_steps_.begin(), memory_steps_.end());
    if (history_.size() < depth)
        throw std::invalid_argument("return history shorter than the largest memory");
}

std::span<const double> LlsPopulation::window(std::size_t group) const {
    const std::size_t m = memory_steps_[group];
    return {history_.data() + (history_.size() - m), m};
}

void LlsPopulation::begin_step(const MarketState& market, RandomGenerator& rng) {
    dividend_ = dividend_step(dividend_, params_.z1, params_.z2, market.clock.delta_t, rng);
    prev_price_ = market.price;
    delta_t_ = market.clock.delta_t;
    double boundary_agents = 0.0;
    for (std::size_t g = 0; g < memory_steps_.size(); ++g) {
        gamma_star_[g] = optimal_investment(window(g), params_.interest_rate, delta_t_);
        if (gamma_star_[g] == kGammaMin || gamma_star_[g] == kGammaMax)
            boundary_agents += static_cast<double>(group_offset_[g + 1] - group_offset_[g]);
    }
    step_boundary_fraction_ = boundary_agents / static_cast<double>(size());
    const double sigma = params_.sigma_gamma;
    for (std::size_t i = 0; i < size(); ++i) {
        const double star = gamma_star_[static_cast<std::size_t>(group_of_[i])];
        double gamma = star;
        if (sigma > 0) {
            if (params_.noise_truncation > 0) {
                const double bound = params_.noise_truncation * sigma;
                gamma += rng.next_truncated_normal(0.0, sigma, -bound, bound);
            } else {
                // truncate the noisy fraction into the admissible interval
                gamma = rng.next_truncated_normal(star, sigma, kGammaMin, kGammaMax);
            }
        }
        pending_gamma_[i] = std::clamp(gamma, kGammaMin, kGammaMax);
    }
}

double LlsPopulation::clearance_mismatch(double candidate_price) {
    if (!(candidate_price > 0))
        throw std::domain_error("clearance mismatch needs a positive candidate price");
    const double x = stock_return_x(candidate_price, prev_price_, dividend_, delta_t_,
                                    params_.denominator);
    const double r = params_.interest_rate;
    double demanded = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        // hypothetical wealth under the candidate; committed only on convergence
        const double w =
            wealth_[i] * (1.0 + delta_t_ * ((1.0 - gamma_[i]) * r + gamma_[i] * x));
        demanded += pending_gamma_[i] * w / candidate_price;
    }
    return demanded - total_shares_;
}

void LlsPopulation::update(const MarketState& market, RandomGenerator&) {
    const double x =
        stock_return_x(market.price, market.prev_price, dividend_, market.clock.delta_t,
                       params_.denominator);
    for (std::size_t i = 0; i < size(); ++i) {
        wealth_[i] = lls_wealth_update(wealth_[i], gamma_[i], params_.interest_rate, x,
                                       market.clock.delta_t);
        gamma_[i] = pending_gamma_[i];
        shares_[i] = gamma_[i] * wealth_[i] / market.price;
    }
    history_.push_back(x);
}

void LlsPopulation::record(Recorder& recorder) const {
    for (std::size_t g = 0; g < memory_steps_.size(); ++g) {
        double sum = 0.0;
        for (std::size_t i = group_offset_[g]; i < group_offset_[g + 1]; ++i)
            sum += wealth_[i];
        recorder.append("group_wealth_" + std::to_string(g), sum);
        recorder.append("gamma_star_" + std::to_string(g), gamma_star_[g]);
    }
    recorder.append("boundary_fraction", step_boundary_fraction_);
    double shares = 0.0;
    for (double s : shares_) shares += s;
    recorder.append("total_shares", shares);
    recorder.append("dividend", dividend_);
}

std::vector<std::string> LlsPopulation::observable_names() const {
    std::vector<std::string> names;
    for (std::size_t g = 0; g < memory_steps_.size(); ++g) {
        names.push_back("group_wealth_" + std::to_string(g));
        names.push_back("gamma_star_" + std::to_string(g));
    }
    names.insert(names.end(), {"boundary_fraction", "total_shares", "dividend"});
    return names;
}

}  // namespace abcem
