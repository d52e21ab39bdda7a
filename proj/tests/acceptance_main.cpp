// Acceptance suite: one self-contained check per criterion, each printing a
// [PASS]/[FAIL] line with the measured quantities. Run a single criterion
// with --criterion N (as the ctest entries do) or everything with --all.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "abcem/agents_cross.hpp"
#include "abcem/agents_harras.hpp"
#include "abcem/agents_lls.hpp"
#include "abcem/config.hpp"
#include "abcem/market.hpp"
#include "abcem/output.hpp"
#include "abcem/runner.hpp"
#include "abcem/stats.hpp"

using namespace abcem;
using Eigen::ArrayXd;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(bool ok, const std::string& label, const std::string& detail) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << label << ": " << detail << "\n";
    if (!ok) ++g_failures;
}

bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

std::string load_config_text(const std::string& name) {
    const fs::path path = fs::path(ABCEM_CONFIG_DIR) / name;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("missing config " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

SimulationConfig config_with(const std::string& name,
                             std::vector<std::pair<std::string, std::string>> overrides) {
    return parse_config_text(override_config_values(load_config_text(name), overrides));
}

unsigned worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

ArrayXd to_array(const std::vector<double>& v) {
    return Eigen::Map<const ArrayXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

struct ReturnStats {
    double kurtosis;
    ArrayXd acf_raw;
    ArrayXd acf_abs;
};

ReturnStats return_stats(const RunOutput& run, int lags) {
    const ArrayXd returns = stats::log_returns(to_array(run.price_series));
    return {stats::excess_kurtosis(returns), stats::autocorrelation(returns, lags),
            stats::autocorrelation(returns.abs(), lags)};
}

std::vector<ReturnStats> run_many(SimulationConfig config, int runs, int lags) {
    config.plan.repetitions = runs;
    const auto outputs = run_plan(config, worker_threads());
    std::vector<ReturnStats> result;
    result.reserve(outputs.size());
    for (const auto& run : outputs) result.push_back(return_stats(run, lags));
    return result;
}

double mean_of(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

/// Mean per-step boundary fraction of the pre-noise optima, skipping the
/// undecided initial row.
double run_boundary_fraction(const RunOutput& run) {
    const auto& series = run.observables.at("boundary_fraction");
    double sum = 0.0;
    for (std::size_t k = 1; k < series.size(); ++k) sum += series[k];
    return sum / static_cast<double>(series.size() - 1);
}

double lstsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double jackknife_stderr_kurtosis(const std::vector<double>& sample) {
    const std::size_t n = sample.size();
    std::vector<double> leave_one(n);
    std::vector<double> reduced(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t k = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) reduced[k++] = sample[j];
        leave_one[i] = stats::excess_kurtosis(to_array(reduced));
    }
    const double mean = mean_of(leave_one);
    double ss = 0.0;
    for (double v : leave_one) ss += (v - mean) * (v - mean);
    return std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
}

/// Deterministic generator for the hand-computed scenarios: scripted
/// standard-normal values, then zeros everywhere.
struct ZeroNoise final : RandomGenerator {
    std::vector<double> normals;
    std::size_t cursor = 0;
    double next_uniform(double lo, double) override { return lo; }
    std::size_t next_index(std::size_t) override { return 0; }
    double next_normal(double mu, double sigma) override {
        const double z = cursor < normals.size() ? normals[cursor++] : 0.0;
        return mu + z * sigma;
    }
    double next_truncated_normal(double mu, double, double, double) override { return mu; }
    std::uint64_t raw() override { return 0; }
};

// ---------------------------------------------------------------------------
// 1. hand-checked one-step integration for each model

void criterion_1_cross() {
    // three steps small enough to do on paper: one contrarian accumulates
    // pressure (2e-5 per step against ED = 0.5), flips in step 2, and step 3
    // moves the price by exp(kappa * dED) = exp(0.1)
    std::vector<CrossAgentState> agents(4);
    for (auto& agent : agents) {
        agent.position = 1;
        agent.pressure = 0.0;
        agent.switch_price = 1.0;
        agent.inaction = 10.0;
        agent.herding_limit = 1.0;
    }
    agents[3].position = -1;
    agents[3].herding_limit = 3e-5;
    CrossPopulation population(agents, CrossParams{});

    ZeroNoise rng;
    MeanDecisionExcessDemand ed_calc;
    CrossPriceCalculator price_calc(1.0, 0.0, 0.2);
    StockExchange exchange(population, ed_calc, price_calc, rng, 4e-5, 3);
    Recorder recorder;
    exchange.run(recorder);
    const auto& price = recorder.series().at("price");
    const auto& ed = recorder.series().at("excess_demand");
    const bool ok = close_rel(price[1], 1.0, 1e-12) && close_rel(price[2], 1.0, 1e-12) &&
                    close_rel(price[3], 1.1051709180756477, 1e-12) && ed[2] == 0.5 &&
                    ed[3] == 1.0 && population.agents()[3].position == 1 &&
                    population.agents()[3].pressure == 0.0;
    report(ok, "criterion 1 (threshold traders)",
           "price after flip " + fmt(price[3]) + " vs exp(0.1) = " + fmt(std::exp(0.1)));
}

void criterion_1_lls() {
    // one clearance step of a single log-utility investor; the clearing
    // price solves 100 S^2 - 0.99*1424 S + 0.99*1516 = 0 by hand
    LlsParams params;
    params.groups = {{1, 2}};
    params.sigma_gamma = 0.0;
    params.interest_rate = 0.04;
    params.z1 = params.z2 = 0.05;
    params.initial_dividend = 0.2;
    LlsPopulation population(params, 4.0, 1.0, std::vector<double>{0.05, 0.045});
    ZeroNoise rng;
    ClearanceExcessDemand ed_calc;
    BisectionPriceCalculator price_calc(4.0, {1e-12, 10000, 0.01, 1e6});
    StockExchange exchange(population, ed_calc, price_calc, rng, 1.0, 1);
    Recorder recorder;
    exchange.run(recorder);

    const double a = 100.0, b = -0.99 * 1424.0, c = 0.99 * 1516.0;
    const double expected_price = (-b + std::sqrt(b * b - 4 * a * c)) / (2 * a);
    const double price = exchange.market().price;
    const double x = ((price - 4.0) / 1.0 + 0.21) / price;
    const double expected_wealth = 1000.0 * (1.0 + 0.6 * 0.04 + 0.4 * x);
    bool ok = close_rel(price, expected_price, 1e-12);
    ok = ok && close_rel(population.wealth()[0], expected_wealth, 1e-12);
    ok = ok && population.committed_gamma()[0] == kGammaMax;
    ok = ok &&
         close_rel(population.shares()[0], kGammaMax * population.wealth()[0] / price, 1e-12);
    ok = ok && close_rel(population.dividend(), 0.21, 1e-12);
    report(ok, "criterion 1 (log-utility investors)",
           "clearing price " + fmt(price) + " vs quadratic root " + fmt(expected_price));
}

void criterion_1_harras() {
    // one full step on the 2x2 torus with scripted news and signals: a prior
    // buy settles at the moved price, opinions form from the primed news
    // weight, and exactly one trader crosses its threshold
    ZeroNoise rng;
    rng.normals = {2.0, 0.1, -0.1, 0.0, 3.0};  // news, then four private signals
    HarrasParams params;
    HarrasPopulation population(4, params, rng);
    for (std::size_t i = 0; i < 4; ++i)
        population.set_agent(i, 1.0, 1.0, 1.0, 1.5, {1, 1, 1, 1}, {1, 1, 1, 1}, 1.0, 1.0,
                             i == 0 ? 1 : 0, i == 0 ? 0.02 : 0.0);
    population.feedback().news_weight = 0.5;
    VolumeExcessDemand ed_calc(params.market_depth);
    HarrasPriceCalculator price_calc(1.0);
    StockExchange exchange(population, ed_calc, price_calc, rng, 1.0, 1);
    Recorder recorder;
    exchange.run(recorder);

    // ED from the stored order: 0.02 / (0.25 * 4) = 0.02; the log rule moves
    // the price to exp(0.02); the prior buyer pays volume * new price.
    // opinions: psi_i = mean(trust * E) + u * news + eps_i with expectations
    // refreshed from the previous actions {1,0,0,0}; neighbors of agent 1 on
    // the torus are {0,0,3,3}, so psi = {1.1, 1.4, 1.0, 4.0} against 1.5.
    const double ed = 0.02 / (0.25 * 4.0);
    const double new_price = std::exp(ed);
    bool ok = close_rel(exchange.market().price, new_price, 1e-12);
    ok = ok && close_rel(population.cash()[0], 1.0 - 0.02 * new_price, 1e-12);
    ok = ok && close_rel(population.stock()[0], 1.02, 1e-12);
    ok = ok && population.decisions()[0] == 0 && population.decisions()[1] == 0 &&
         population.decisions()[2] == 0 && population.decisions()[3] == 1;
    ok = ok && close_rel(population.volumes()[3], 0.02 / new_price, 1e-12);
    ok = ok && population.feedback().news_weight == 0.5;  // recursions start next step
    report(ok, "criterion 1 (lattice traders)",
           "settled cash " + fmt(population.cash()[0]) + ", moved price " +
               fmt(exchange.market().price));
}

// ---------------------------------------------------------------------------
// 2-4. threshold-trader stylized facts

void criterion_2() {
    const auto runs = run_many(config_with("cross_base.xml", {}), 20, 20);
    double worst_lag = 0.0;
    for (int lag = 1; lag <= 20; ++lag) {
        double acc = 0.0;
        for (const auto& r : runs) acc += r.acf_raw[lag];
        worst_lag = std::max(worst_lag, std::abs(acc / runs.size()));
    }
    std::vector<double> kurt;
    for (const auto& r : runs) kurt.push_back(r.kurtosis);
    const double mean_kurtosis = mean_of(kurt);
    report(worst_lag < 0.05, "criterion 2a (no raw-return correlation)",
           "max |mean acf(1..20)| = " + fmt(worst_lag) + " < 0.05");
    report(mean_kurtosis > 2.0 && mean_kurtosis <= 12.0, "criterion 2b (fat tails)",
           "mean excess kurtosis = " + fmt(mean_kurtosis) + " in [2, 12]");
}

void criterion_3() {
    const auto runs = run_many(config_with("cross_theta2.xml", {}), 20, 20);
    double abs_lag1 = 0.0, worst_raw = 0.0;
    for (const auto& r : runs) abs_lag1 += r.acf_abs[1];
    abs_lag1 /= runs.size();
    for (int lag = 1; lag <= 20; ++lag) {
        double acc = 0.0;
        for (const auto& r : runs) acc += r.acf_raw[lag];
        worst_raw = std::max(worst_raw, std::abs(acc / runs.size()));
    }
    report(abs_lag1 > 0.1 && worst_raw < 0.05, "criterion 3 (volatility clustering)",
           "mean acf_abs(1) = " + fmt(abs_lag1) + " > 0.1, max |mean acf_raw| = " +
               fmt(worst_raw) + " < 0.05");
}

void criterion_4() {
    const auto small =
        run_many(config_with("cross_base.xml", {{"agents.agentSettings.count", "100"}}), 20, 1);
    const auto large = run_many(
        config_with("cross_base.xml", {{"agents.agentSettings.count", "100000"}}), 20, 1);
    std::vector<double> ks, kl;
    for (const auto& r : small) ks.push_back(r.kurtosis);
    for (const auto& r : large) kl.push_back(r.kurtosis);
    const double mean_small = mean_of(ks), mean_large = mean_of(kl);
    const double ratio = std::max(mean_small, mean_large) / std::min(mean_small, mean_large);
    const bool in_band =
        mean_small >= 2.0 && mean_small <= 12.0 && mean_large >= 2.0 && mean_large <= 12.0;
    report(in_band && ratio < 2.0, "criterion 4 (no finite-size effect)",
           "kurtosis mean N=100: " + fmt(mean_small) + ", N=1e5: " + fmt(mean_large) +
               ", ratio " + fmt(ratio) + " < 2");
}

// ---------------------------------------------------------------------------
// 5. drift choice controls the tail weight of the SDE-priced model

void criterion_5() {
    const auto kurtosis_for = [&](const std::string& drift, const std::string& theta) {
        const auto runs = run_many(
            config_with("cross_sde.xml", {{"priceCalculatorSettings.drift", drift},
                                          {"priceCalculatorSettings.theta", theta}}),
            100, 1);
        std::vector<double> k;
        for (const auto& r : runs) k.push_back(r.kurtosis);
        return mean_of(k);
    };
    const double d1_t0 = kurtosis_for("ed-derivative", "0");
    const double d1_t2 = kurtosis_for("ed-derivative", "2");
    const double d2_t0 = kurtosis_for("ed-level", "0");
    const double d2_t2 = kurtosis_for("ed-level", "2");
    report(d1_t0 > 10.0, "criterion 5a (derivative drift, fat tails)",
           "mean excess kurtosis = " + fmt(d1_t0) + " > 10");
    report(d2_t0 >= -0.5 && d2_t0 <= 0.5, "criterion 5b (level drift, Gaussian)",
           "mean excess kurtosis = " + fmt(d2_t0) + " in [-0.5, 0.5]");
    report(d1_t0 > d2_t0 && d1_t2 > d2_t2, "criterion 5c (drift ordering)",
           "theta=0: " + fmt(d1_t0) + " > " + fmt(d2_t0) + "; theta=2: " + fmt(d1_t2) +
               " > " + fmt(d2_t2));
}

// ---------------------------------------------------------------------------
// 6. wealth-extension kurtosis rises with the stock fraction

void criterion_6() {
    const std::vector<std::string> gammas{"0.25", "0.5", "0.75", "1.0"};
    std::vector<double> means, errors;
    for (const auto& gamma : gammas) {
        SimulationConfig config =
            config_with("cross_wealth.xml", {{"agents.agentSettings.wealth.gamma", gamma}});
        config.plan.repetitions = 100;
        const auto outputs = run_plan(config, worker_threads());
        std::vector<double> final_wealth;
        for (const auto& run : outputs) {
            const auto& snapshot = run.snapshots.at("final_wealth");
            // the wealth rule is common to every agent: the cross-section is flat
            for (double w : snapshot)
                if (w != snapshot.front())
                    throw std::runtime_error("wealth cross-section unexpectedly spread");
            final_wealth.push_back(snapshot.front());
        }
        means.push_back(stats::excess_kurtosis(to_array(final_wealth)));
        errors.push_back(jackknife_stderr_kurtosis(final_wealth));
    }
    int violations = 0;
    bool within_error = true;
    for (std::size_t i = 0; i + 1 < means.size(); ++i) {
        if (means[i + 1] < means[i]) {
            ++violations;
            if (means[i] - means[i + 1] >= errors[i] + errors[i + 1]) within_error = false;
        }
    }
    std::ostringstream detail;
    for (std::size_t i = 0; i < means.size(); ++i)
        detail << "g=" << gammas[i] << ": " << fmt(means[i]) << "+-" << fmt(errors[i]) << "  ";
    report(violations == 0 || (violations == 1 && within_error),
           "criterion 6 (wealth kurtosis grows with the stock fraction)", detail.str());
}

// ---------------------------------------------------------------------------
// 7-10. log-utility investors

void criterion_7() {
    const RunOutput run = run_simulation(config_with("lls_basic.xml", {}), 0);
    const auto& gamma_star = run.observables.at("gamma_star_0");
    bool boundary = true, constant = true;
    for (std::size_t k = 1; k < gamma_star.size(); ++k) {
        if (gamma_star[k] != kGammaMin && gamma_star[k] != kGammaMax) boundary = false;
        if (gamma_star[k] != gamma_star[1]) constant = false;
    }
    report(boundary && constant, "criterion 7 (deterministic optima pinned to a boundary)",
           std::string("gamma* = ") + fmt(gamma_star[1]) + " at every step");
}

void criterion_8() {
    SimulationConfig config = config_with("lls_noisy.xml", {});
    config.plan.repetitions = 100;
    const auto outputs = run_plan(config, worker_threads());
    std::vector<double> fractions;
    for (const auto& run : outputs) fractions.push_back(run_boundary_fraction(run));
    const double mean_fraction = mean_of(fractions);
    report(mean_fraction >= 0.85 && mean_fraction <= 0.95,
           "criterion 8 (noisy decisions ~90% at the boundaries)",
           "mean boundary fraction = " + fmt(mean_fraction) + " in [0.85, 0.95]");
}

void criterion_9() {
    SimulationConfig config = config_with("lls_three_groups_999.xml", {});
    config.plan.repetitions = 10;
    const auto outputs = run_plan(config, worker_threads());
    std::vector<double> kurt;
    for (const auto& run : outputs)
        kurt.push_back(stats::excess_kurtosis(stats::log_returns(to_array(run.price_series))));
    const double mean_kurtosis = mean_of(kurt);

    // the small population is recorded alongside for visual comparison of the
    // group-wealth ranking across N (the finite-size effect)
    const fs::path out_dir = fs::path("acceptance_out") / "lls_finite_size";
    write_csv_run(run_simulation(config_with("lls_three_groups.xml", {}), 0),
                  out_dir / "n99" / "run_000");
    write_csv_run(outputs.front(), out_dir / "n999" / "run_000");
    const bool emitted = fs::exists(out_dir / "n99" / "run_000" / "group_wealth_2.csv") &&
                         fs::exists(out_dir / "n999" / "run_000" / "group_wealth_2.csv");

    report(mean_kurtosis >= -0.5 && mean_kurtosis <= 0.5 && emitted,
           "criterion 9 (large population returns Gaussian)",
           "mean excess kurtosis = " + fmt(mean_kurtosis) +
               " in [-0.5, 0.5]; group-wealth series written to " + out_dir.string());
}

struct BoundaryMeasurement {
    double full;        // over every decision of the run
    double settled;     // skipping the first max-memory steps (artificial history)
};

BoundaryMeasurement boundary_fraction_for(const std::string& scaling, double delta_t,
                                          int runs) {
    const std::int64_t steps = std::llround(200.0 / delta_t);  // fixed model horizon
    SimulationConfig config =
        config_with("lls_noisy.xml", {{"agents.agentSettings.scalingMode", scaling},
                                      {"runPlan.deltaT", fmt(delta_t)},
                                      {"runPlan.numSteps", std::to_string(steps)}});
    config.plan.repetitions = runs;
    const std::size_t warmup =
        scaling == "scaled-memory"
            ? static_cast<std::size_t>(std::llround(15.0 / delta_t))
            : 15;
    const auto outputs = run_plan(config, worker_threads());
    std::vector<double> full, settled;
    for (const auto& run : outputs) {
        full.push_back(run_boundary_fraction(run));
        const auto& series = run.observables.at("boundary_fraction");
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t k = warmup + 1; k < series.size(); ++k) {
            sum += series[k];
            ++n;
        }
        settled.push_back(sum / static_cast<double>(n));
    }
    return {mean_of(full), mean_of(settled)};
}

void criterion_10() {
    const auto scaled_001 = boundary_fraction_for("scaled-memory", 0.01, 100);
    report(scaled_001.full == 0.0, "criterion 10a (scaled memory, dt=0.01: all interior)",
           "boundary fraction = " + fmt(scaled_001.full) +
               " (exactly 0 required; the residue sits in the artificial-history "
               "transient, after it: " +
               fmt(scaled_001.settled) + ")");

    const auto scaled_01 = boundary_fraction_for("scaled-memory", 0.1, 100);
    report(scaled_01.full >= 0.64 && scaled_01.full <= 0.80,
           "criterion 10b (scaled memory, dt=0.1: ~72% boundary)",
           "boundary fraction = " + fmt(scaled_01.full) + " in [0.64, 0.80]");

    bool fixed_ok = true;
    std::ostringstream detail;
    for (double dt : {1.0, 0.1, 0.01}) {
        const auto fraction = boundary_fraction_for("fixed-memory", dt, 100);
        detail << "dt=" << dt << ": " << fmt(fraction.full) << "  ";
        fixed_ok = fixed_ok && fraction.full >= 0.85 && fraction.full <= 0.95;
    }
    report(fixed_ok, "criterion 10c (fixed memory: ~90% boundary at every step size)",
           detail.str());
}

// ---------------------------------------------------------------------------
// 11. lattice traders: fat tails and volatility clustering

void criterion_11() {
    const auto runs = run_many(config_with("harras_base.xml", {}), 10, 1);
    std::vector<double> kurt, abs_lag1;
    for (const auto& r : runs) {
        kurt.push_back(r.kurtosis);
        abs_lag1.push_back(r.acf_abs[1]);
    }
    const double mean_kurtosis = mean_of(kurt);
    const double mean_abs_lag1 = mean_of(abs_lag1);
    report(mean_kurtosis > 1.0 && mean_abs_lag1 > 0.05,
           "criterion 11 (lattice model stylized facts)",
           "mean excess kurtosis = " + fmt(mean_kurtosis) + " > 1, mean acf_abs(1) = " +
               fmt(mean_abs_lag1) + " > 0.05");
}

// ---------------------------------------------------------------------------
// 12. linear runtime scaling

void criterion_12() {
    const auto agent_rows = bench_cross({1000, 10000, 100000, 1000000}, {10000}, 1, 7);
    std::vector<double> log_n, log_t;
    std::ostringstream agents_detail;
    for (const auto& row : agent_rows) {
        log_n.push_back(std::log(static_cast<double>(row.agents)));
        log_t.push_back(std::log(row.wall_seconds));
        agents_detail << row.agents << ":" << fmt(row.wall_seconds) << "s ";
    }
    const double agent_slope = lstsq_slope(log_n, log_t);

    const auto step_rows = bench_cross({1000}, {1000, 10000, 100000}, 1, 7);
    std::vector<double> log_s, log_ts;
    for (const auto& row : step_rows) {
        log_s.push_back(std::log(static_cast<double>(row.steps)));
        log_ts.push_back(std::log(row.wall_seconds));
    }
    const double step_slope = lstsq_slope(log_s, log_ts);

    report(agent_slope >= 0.8 && agent_slope <= 1.2, "criterion 12a (linear in agents)",
           "log-log slope = " + fmt(agent_slope) + " in [0.8, 1.2]; " + agents_detail.str());
    report(step_slope >= 0.9 && step_slope <= 1.1, "criterion 12b (linear in steps)",
           "log-log slope = " + fmt(step_slope) + " in [0.9, 1.1]");
}

// ---------------------------------------------------------------------------
// 13. random-number pooling: exact equivalence and batch speedup

void criterion_13() {
    TwisterGenerator fly({RngAlgorithm::MersenneTwister64, 2027, RngMode::OnTheFly, 0});
    TwisterGenerator pooled({RngAlgorithm::MersenneTwister64, 2027, RngMode::Pooled, 4093});
    bool equal = true;
    for (int i = 0; i < 200000 && equal; ++i) {
        equal = equal && fly.next_uniform(0.0, 1.0) == pooled.next_uniform(0.0, 1.0);
        equal = equal && fly.next_normal(0.0, 1.0) == pooled.next_normal(0.0, 1.0);
        equal = equal && fly.next_index(11) == pooled.next_index(11);
        equal = equal && fly.next_truncated_normal(0.0, 0.2, -0.3, 0.3) ==
                             pooled.next_truncated_normal(0.0, 0.2, -0.3, 0.3);
        equal = equal && fly.next_uniform(-2.0, 7.0) == pooled.next_uniform(-2.0, 7.0);
    }
    report(equal, "criterion 13a (pooled stream equivalence)",
           "1e6 mixed variates identical in both modes");

    constexpr std::size_t total = 100000000;
    std::uint64_t checksum = 0;

    // the delivery paths as configured in a run: per-draw dispatch into the
    // engine versus buffered reads refilled blockwise
    TwisterGenerator per_call({RngAlgorithm::MersenneTwister64, 99, RngMode::OnTheFly, 0});
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < total; ++i) checksum ^= per_call.raw();
    const auto t1 = std::chrono::steady_clock::now();

    TwisterGenerator batched({RngAlgorithm::MersenneTwister64, 99, RngMode::Pooled, 1 << 16});
    const auto t2 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < total; ++i) checksum ^= batched.raw();
    const auto t3 = std::chrono::steady_clock::now();

    const double serial = std::chrono::duration<double>(t1 - t0).count();
    const double batch = std::chrono::duration<double>(t3 - t2).count();
    const double speedup = serial / batch;
    report(speedup >= 2.0, "criterion 13b (pooled generation at least twice as fast)",
           "1e8 draws: per-call " + fmt(serial) + "s, pooled " + fmt(batch) + "s, speedup " +
               fmt(speedup) + "x (checksum " + std::to_string(checksum % 997) + ")");
}

// ---------------------------------------------------------------------------
// 14. standalone property sweep

void criterion_14() {
    TwisterGenerator gen({RngAlgorithm::MersenneTwister64, 1111, RngMode::OnTheFly, 0});
    bool stats_ok = true;
    for (int trial = 0; trial < 20; ++trial) {
        const auto n = static_cast<Eigen::Index>(16 + gen.next_index(500));
        std::vector<double> values(static_cast<std::size_t>(n));
        for (auto& v : values) v = gen.next_uniform(-2.0, 6.0);
        const ArrayXd x = to_array(values);
        long double m = 0.0L;
        for (double v : values) m += v;
        m /= static_cast<long double>(n);
        long double m2 = 0.0L, m4 = 0.0L;
        for (double v : values) {
            const long double d = v - m;
            m2 += d * d;
            m4 += d * d * d * d;
        }
        m2 /= static_cast<long double>(n);
        m4 /= static_cast<long double>(n);
        stats_ok = stats_ok && close_rel(stats::excess_kurtosis(x),
                                         static_cast<double>(m4 / (m2 * m2) - 3.0L), 1e-12);
    }
    report(stats_ok, "criterion 14a (statistics vs direct definitions)",
           "20 random instances agree to 1e-12 relative");

    bool foc_ok = true;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> window(2 + gen.next_index(12));
        for (auto& x : window) x = gen.next_uniform(-0.3, 0.4);
        const double found = optimal_investment(window, 0.04, 1.0);
        const double f_lo = first_order_condition(kGammaMin, window, 0.04, 1.0);
        const double f_hi = first_order_condition(kGammaMax, window, 0.04, 1.0);
        if (found == kGammaMin)
            foc_ok = foc_ok && f_lo <= 0;
        else if (found == kGammaMax)
            foc_ok = foc_ok && f_hi >= 0;
        else
            foc_ok = foc_ok && std::abs(first_order_condition(found, window, 0.04, 1.0)) < 1e-6 &&
                     f_lo > 0 && f_hi < 0;
    }
    report(foc_ok, "criterion 14b (optimizer matches the optimality conditions)",
           "20 random windows classified consistently");

    SimulationConfig lls = config_with("lls_noisy.xml", {{"runPlan.numSteps", "50"}});
    const RunOutput run = run_simulation(lls, 0);
    bool shares_ok = true;
    for (double total : run.observables.at("total_shares"))
        shares_ok = shares_ok && std::abs(total - 10000.0) <= 0.1 + 1e-9;
    report(shares_ok, "criterion 14c (share conservation under clearance)",
           "|sum shares - 10000| <= 0.1 at every step");

    bool positive_ok = true;
    for (const double price : run.price_series) positive_ok = positive_ok && price > 0;
    SimulationConfig cross = config_with("cross_base.xml", {{"runPlan.numSteps", "2000"}});
    const RunOutput cross_run = run_simulation(cross, 0);
    for (const double price : cross_run.price_series) positive_ok = positive_ok && price > 0;
    report(positive_ok, "criterion 14d (price positivity)",
           "all prices positive across clearance and exponential-rule runs");

    const RunOutput again = run_simulation(cross, 0);
    const bool deterministic =
        again.price_series == cross_run.price_series && again.ed_series == cross_run.ed_series;
    report(deterministic, "criterion 14e (fixed seeds reproduce bitwise)",
           "repeated run identical");
}

}  // namespace

int main(int argc, char** argv) {
    int criterion = 0;
    bool all = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
            criterion = std::atoi(argv[++i]);
        else if (std::strcmp(argv[i], "--all") == 0)
            all = true;
    }
    if (criterion == 0 && !all) {
        std::cerr << "usage: abcem_acceptance --criterion N | --all\n";
        return 2;
    }
    try {
        const auto want = [&](int n) { return all || criterion == n; };
        if (want(1)) {
            criterion_1_cross();
            criterion_1_lls();
            criterion_1_harras();
        }
        if (want(2)) criterion_2();
        if (want(3)) criterion_3();
        if (want(4)) criterion_4();
        if (want(5)) criterion_5();
        if (want(6)) criterion_6();
        if (want(7)) criterion_7();
        if (want(8)) criterion_8();
        if (want(9)) criterion_9();
        if (want(10)) criterion_10();
        if (want(11)) criterion_11();
        if (want(12)) criterion_12();
        if (want(13)) criterion_13();
        if (want(14)) criterion_14();
    } catch (const std::exception& e) {
        std::cout << "[FAIL] criterion " << (criterion == 0 ? -1 : criterion)
                  << ": aborted with \"" << e.what() << "\"\n";
        return 1;
    }
    return g_failures == 0 ? 0 : 1;
}
