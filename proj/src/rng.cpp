#include "abcem/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace abcem {

void Mt19937x64::reseed(std::uint64_t seed) {
    state_[0] = seed;
    for (std::size_t i = 1; i < kN; ++i) {
        state_[i] = 6364136223846793005ULL * (state_[i - 1] ^ (state_[i - 1] >> 62)) +
                    static_cast<std::uint64_t>(i);
    }
    index_ = kN;
}

void Mt19937x64::twist() {
    // branchless segments so the block regeneration vectorizes
    const auto mix = [](std::uint64_t hi, std::uint64_t lo, std::uint64_t far) {
        const std::uint64_t x = (hi & kUpperMask) | (lo & kLowerMask);
        return far ^ (x >> 1) ^ ((0ULL - (x & 1ULL)) & kMatrixA);
    };
    std::size_t i = 0;
    for (; i < kN - kM; ++i) state_[i] = mix(state_[i], state_[i + 1], state_[i + kM]);
    for (; i < kN - 1; ++i) state_[i] = mix(state_[i], state_[i + 1], state_[i + kM - kN]);
    state_[kN - 1] = mix(state_[kN - 1], state_[0], state_[kM - 1]);
    index_ = 0;
}

void Mt19937x64::fill(std::span<std::uint64_t> out) {
    std::size_t pos = 0;
    while (pos < out.size()) {
        if (index_ == kN) twist();
        const std::size_t take = std::min(out.size() - pos, kN - index_);
        // element-wise tempering over a block; vectorizes
        const std::uint64_t* __restrict source = state_.data() + index_;
        std::uint64_t* __restrict destination = out.data() + pos;
        for (std::size_t j = 0; j < take; ++j) destination[j] = temper(source[j]);
        index_ += take;
        pos += take;
    }
}

void RandomGenerator::throw_empty_set() {
    throw std::invalid_argument("discrete uniform draw from an empty set");
}

TwisterGenerator::TwisterGenerator(const GeneratorSpec& spec)
    : spec_(spec), source_(std::make_unique<TwisterSource>(spec.seed)) {
    if (spec.mode == RngMode::Pooled) {
        if (spec.pool_size < 1) throw std::invalid_argument("pool_size must be >= 1");
        pooled_ = true;
        pool_.resize(spec.pool_size);
        cursor_ = pool_.size();  // first raw() triggers the first fill
    }
}

void TwisterGenerator::fill_pool(std::size_t n) {
    if (!pooled_) throw std::logic_error("fill_pool requires pooled mode");
    if (n < 1) throw std::invalid_argument("pool refill size must be >= 1");
    if (cursor_ != pool_.size())
        throw std::logic_error("pool refilled before it was exhausted");
    pool_.resize(n);
    source_->fill(pool_);
    cursor_ = 0;
}

double TwisterGenerator::next_uniform(double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("next_uniform requires lo < hi");
    double v = lo + unit_uniform() * (hi - lo);
    if (v >= hi) v = std::nextafter(hi, lo);  // guard the half-open contract
    return v;
}

std::size_t TwisterGenerator::next_index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("next_index requires n >= 1");
    return static_cast<std::size_t>(unit_uniform() * static_cast<double>(n));
}

double TwisterGenerator::next_normal(double mu, double sigma) {
    if (sigma < 0) throw std::invalid_argument("next_normal requires sigma >= 0");
    if (sigma == 0) return mu;
    double u, v, s;
    do {
        u = 2.0 * unit_uniform() - 1.0;
        v = 2.0 * unit_uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    // second variate of the pair is discarded to keep consumption auditable
    return mu + sigma * u * std::sqrt(-2.0 * std::log(s) / s);
}

double TwisterGenerator::next_truncated_normal(double mu, double sigma, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("truncated normal requires lo < hi");
    if (sigma < 0) throw std::invalid_argument("truncated normal requires sigma >= 0");
    if (sigma == 0) {
        if (mu < lo || mu > hi)
            throw std::invalid_argument("degenerate truncated normal with mu outside bounds");
        return mu;
    }
    for (std::size_t attempt = 0; attempt < 1000000; ++attempt) {
        const double x = next_normal(mu, sigma);
        if (x >= lo && x <= hi) return x;
    }
    throw std::runtime_error("truncated normal: rejection did not terminate");
}

std::unique_ptr<RandomGenerator> make_generator(const GeneratorSpec& spec) {
    return std::make_unique<TwisterGenerator>(spec);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t run_index) {
    return splitmix64(master_seed + 0x9E3779B97F4A7C15ULL * (run_index + 1));
}

}  // namespace abcem
