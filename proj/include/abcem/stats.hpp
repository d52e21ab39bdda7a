#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace abcem::stats {

using Eigen::ArrayXd;
using Eigen::Index;

/// Log returns r_k = log(S_{k+1} / S_k). Throws if any price is
/// non-positive or fewer than two prices are given.
ArrayXd log_returns(const Eigen::Ref<const ArrayXd>& prices);

double mean(const Eigen::Ref<const ArrayXd>& x);

/// Population (biased) variance.
double variance(const Eigen::Ref<const ArrayXd>& x);

/// m4 / m2^2 - 3 with population central moments. Location and scale
/// invariant. Throws for n < 4 or zero variance.
double excess_kurtosis(const Eigen::Ref<const ArrayXd>& x);

/// rho(0..max_lag) with rho(l) = sum (x_t - m)(x_{t+l} - m) / sum (x_t - m)^2.
/// Throws if the series is shorter than max_lag + 1 or has zero variance.
ArrayXd autocorrelation(const Eigen::Ref<const ArrayXd>& x, Index max_lag);

struct QqPoint {
    double theoretical;  // standard normal quantile at (i - 0.5) / n
    double empirical;    // i-th order statistic of the standardized sample
};

/// Normal probability plot points for the standardized sample.
std::vector<QqPoint> qq_points(const Eigen::Ref<const ArrayXd>& x);

struct Histogram {
    ArrayXd edges;                    // bins + 1 ascending edges
    std::vector<std::int64_t> counts; // counts per bin, sum to n
};

Histogram histogram(const Eigen::Ref<const ArrayXd>& x, int bins);

struct RunAggregate {
    double mean;
    double stderr_;  // sample stddev / sqrt(runs); 0 for a single run
};

RunAggregate aggregate_runs(std::span<const double> per_run_values);

/// Per-step sums of member columns: wealth is steps x agents, group_of maps
/// each agent to a contiguous group id in [0, num_groups).
std::vector<ArrayXd> group_wealth_series(const Eigen::Ref<const Eigen::MatrixXd>& wealth,
                                         std::span<const int> group_of, int num_groups);

/// Inverse standard normal CDF (rational approximation, |rel err| < 1.2e-9).
double normal_quantile(double p);

}  // namespace abcem::stats
