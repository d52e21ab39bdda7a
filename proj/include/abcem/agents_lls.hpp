#pragma once

#include <limits>
#include <span>
#include <vector>

#include "abcem/engine.hpp"

namespace abcem {

enum class MemoryScaling { FixedMemory, ScaledMemory };
enum class ReturnDenominator { CurrentPrice, PreviousPrice };

struct LlsGroupSpec {
    std::size_t count = 0;
    double memory = 15.0;  // look-back; steps (fixed) or time units (scaled)
};

struct LlsParams {
    std::vector<LlsGroupSpec> groups;
    double sigma_gamma = 0.0;      // noise on the optimal investment fraction
    double interest_rate = 0.04;   // bond rate
    double z1 = 0.05, z2 = 0.05;   // dividend growth ~ U(z1, z2)
    double mu_history = 0.0415;    // artificial return history ~ N(mu, sigma)
    double sigma_history = 0.003;
    MemoryScaling scaling = MemoryScaling::FixedMemory;
    ReturnDenominator denominator = ReturnDenominator::CurrentPrice;
    double initial_wealth = 1000.0;
    double initial_shares = 100.0;
    double initial_gamma = 0.4;
    double initial_dividend = 0.2;
    double noise_truncation = 2.0;  // epsilon truncated at +- k sigma_gamma
};

inline constexpr double kGammaMin = 0.01;
inline constexpr double kGammaMax = 0.99;

/// D (1 + dt z), z ~ U(z1, z2); deterministic (no draw) when z1 == z2.
/// Throws if the parameters permit a non-positive dividend.
double dividend_step(double dividend, double z1, double z2, double delta_t,
                     RandomGenerator& rng);

/// Total stock return x = ((S - S_prev) / dt + D) / S, with the denominator
/// switchable to the previous price.
double stock_return_x(double price, double prev_price, double dividend, double delta_t,
                      ReturnDenominator denominator = ReturnDenominator::CurrentPrice);

/// Mean over the window of log((1-g) w (1+r dt) + g w (1+x dt)). Throws on a
/// non-positive utility argument.
double expected_log_utility(double gamma, std::span<const double> window,
                            double interest_rate, double delta_t, double wealth);

/// f(g) = mean of dt (x - r) / (dt (x - r) g + 1 + dt r); strictly decreasing
/// in g wherever it changes sign. Throws on a vanishing denominator.
double first_order_condition(double gamma, std::span<const double> window,
                             double interest_rate, double delta_t);

/// Boundary classification of the first-order condition, with an interior
/// bisection root to 1e-8 absolute when the sign changes across [0.01, 0.99].
double optimal_investment(std::span<const double> window, double interest_rate,
                          double delta_t);

/// Fraction of pre-noise optima lying on the admissible boundary.
double boundary_decision_fraction(std::span<const double> gamma_stars);

/// w (1 + dt ((1-g) r + g x)). Throws if the result is not positive.
double lls_wealth_update(double wealth, double gamma, double interest_rate, double x,
                         double delta_t);

/// Investors allocating between a safe bond and the stock by maximizing
/// expected log wealth over a window of past returns; the price is set each
/// step by the market clearance condition (fixed total shares), evaluated
/// through clearance_mismatch during bisection.
class LlsPopulation final : public AgentPopulation {
public:
    LlsPopulation(const LlsParams& params, double initial_price, double delta_t,
                  RandomGenerator& rng);

    /// Test constructor with an explicit pre-seeded return history
    /// (newest last). The history must cover the largest group memory.
    LlsPopulation(const LlsParams& params, double initial_price, double delta_t,
                  std::vector<double> history);

    std::size_t size() const override { return wealth_.size(); }
    PopulationTraits traits() const override { return {.clearance_mismatch = true}; }

    void begin_step(const MarketState& market, RandomGenerator& rng) override;
    double clearance_mismatch(double candidate_price) override;
    void update(const MarketState& market, RandomGenerator& rng) override;

    void record(Recorder& recorder) const override;
    std::vector<std::string> observable_names() const override;

    double total_shares() const { return total_shares_; }
    double dividend() const { return dividend_; }
    const std::vector<double>& wealth() const { return wealth_; }
    const std::vector<double>& shares() const { return shares_; }
    const std::vector<double>& committed_gamma() const { return gamma_; }
    const std::vector<double>& history() const { return history_; }
    std::span<const double> group_gamma_star() const { return gamma_star_; }
    double pending(std::size_t agent) const { return pending_gamma_[agent]; }

private:
    void init_agents(const LlsParams& params, double delta_t);
    std::span<const double> window(std::size_t group) const;

    LlsParams params_;
    std::vector<std::size_t> memory_steps_;   // per group, after time scaling
    std::vector<std::size_t> group_offset_;   // agents of group g: [offset_g, offset_{g+1})
    std::vector<int> group_of_;
    std::vector<double> wealth_;
    std::vector<double> shares_;
    std::vector<double> gamma_;          // committed fraction of the running period
    std::vector<double> pending_gamma_;  // decided this step, committed in update()
    std::vector<double> gamma_star_;     // this step's pre-noise optimum per group
    std::vector<double> history_;        // global past returns, newest last
    double total_shares_ = 0.0;
    double dividend_ = 0.0;
    double prev_price_ = 0.0;  // committed price the hypothetical return is based on
    double delta_t_ = 1.0;
    double step_boundary_fraction_ = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace abcem
