#include "abcem/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace abcem::stats {

ArrayXd log_returns(const Eigen::Ref<const ArrayXd>& prices) {
    const Index n = prices.size();
    if (n < 2) throw std::invalid_argument("log_returns needs at least two prices");
    if ((prices <= 0.0).any()) throw std::domain_error("log_returns: non-positive price");
    return prices.tail(n - 1).log() - prices.head(n - 1).log();
}

double mean(const Eigen::Ref<const ArrayXd>& x) {
    if (x.size() == 0) throw std::invalid_argument("mean of empty sample");
    return x.mean();
}

double variance(const Eigen::Ref<const ArrayXd>& x) {
    return (x - mean(x)).square().mean();
}

double excess_kurtosis(const Eigen::Ref<const ArrayXd>& x) {
    if (x.size() < 4) throw std::invalid_argument("excess_kurtosis needs n >= 4");
    const ArrayXd c = x - x.mean();
    const double m2 = c.square().mean();
    if (m2 == 0.0) throw std::domain_error("excess_kurtosis of a constant sample");
    const double m4 = c.square().square().mean();
    return m4 / (m2 * m2) - 3.0;
}

ArrayXd autocorrelation(const Eigen::Ref<const ArrayXd>& x, Index max_lag) {
    const Index n = x.size();
    if (max_lag < 0 || n <= max_lag)
        throw std::invalid_argument("autocorrelation: series shorter than max_lag + 1");
    const ArrayXd c = x - x.mean();
    const double denom = c.square().sum();
    if (denom == 0.0) throw std::domain_error("autocorrelation of a constant series");
    ArrayXd rho(max_lag + 1);
    rho[0] = 1.0;
    for (Index lag = 1; lag <= max_lag; ++lag)
        rho[lag] = (c.head(n - lag) * c.tail(n - lag)).sum() / denom;
    return rho;
}

std::vector<QqPoint> qq_points(const Eigen::Ref<const ArrayXd>& x) {
    const Index n = x.size();
    if (n < 2) throw std::invalid_argument("qq_points needs n >= 2");
    const double m = x.mean();
    const double sd = std::sqrt(variance(x));
    if (sd == 0.0) throw std::domain_error("qq_points of a constant sample");
    std::vector<double> sorted(x.data(), x.data() + n);
    std::sort(sorted.begin(), sorted.end());
    std::vector<QqPoint> points(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        points[static_cast<std::size_t>(i)] = {normal_quantile(p),
                                               (sorted[static_cast<std::size_t>(i)] - m) / sd};
    }
    return points;
}

Histogram histogram(const Eigen::Ref<const ArrayXd>& x, int bins) {
    if (bins < 1) throw std::invalid_argument("histogram needs bins >= 1");
    if (x.size() == 0) throw std::invalid_argument("histogram of an empty sample");
    const double lo = x.minCoeff();
    const double hi = x.maxCoeff();
    Histogram h;
    h.edges = ArrayXd::LinSpaced(bins + 1, lo, hi);
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    const double width = hi - lo;
    for (Index i = 0; i < x.size(); ++i) {
        int bin = 0;
        if (width > 0.0) {
            bin = static_cast<int>((x[i] - lo) / width * bins);
            bin = std::clamp(bin, 0, bins - 1);  // x == hi lands in the last bin
        }
        ++h.counts[static_cast<std::size_t>(bin)];
    }
    return h;
}

RunAggregate aggregate_runs(std::span<const double> per_run_values) {
    const std::size_t n = per_run_values.size();
    if (n == 0) throw std::invalid_argument("aggregate_runs needs at least one run");
    double sum = 0.0;
    for (double v : per_run_values) sum += v;
    const double m = sum / static_cast<double>(n);
    if (n == 1) return {m, 0.0};
    double ss = 0.0;
    for (double v : per_run_values) ss += (v - m) * (v - m);
    const double sample_sd = std::sqrt(ss / static_cast<double>(n - 1));
    return {m, sample_sd / std::sqrt(static_cast<double>(n))};
}

std::vector<ArrayXd> group_wealth_series(const Eigen::Ref<const Eigen::MatrixXd>& wealth,
                                         std::span<const int> group_of, int num_groups) {
    if (static_cast<Index>(group_of.size()) != wealth.cols())
        throw std::invalid_argument("group assignment does not match agent count");
    std::vector<ArrayXd> series(static_cast<std::size_t>(num_groups),
                                ArrayXd::Zero(wealth.rows()));
    for (Index a = 0; a < wealth.cols(); ++a) {
        const int g = group_of[static_cast<std::size_t>(a)];
        if (g < 0 || g >= num_groups)
            throw std::invalid_argument("agent assigned to a group outside [0, num_groups)");
        series[static_cast<std::size_t>(g)] += wealth.col(a).array();
    }
    return series;
}

// Acklam's rational approximation to the probit function.
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile needs p in (0,1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    static constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace abcem::stats
