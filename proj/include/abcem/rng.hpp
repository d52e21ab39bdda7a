#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace abcem {

/// 64-bit Mersenne Twister (mt19937-64). The algorithm is fully specified,
/// so the raw integer stream is identical on every platform for a given
/// seed. A block fill() is provided so that pools can be regenerated in one
/// tight loop instead of one call per draw.
class Mt19937x64 {
public:
    explicit Mt19937x64(std::uint64_t seed) { reseed(seed); }

    void reseed(std::uint64_t seed);

    std::uint64_t next() {
        if (index_ == kN) twist();
        return temper(state_[index_++]);
    }

    /// Writes the next out.size() draws of the stream into out. The stream
    /// position afterwards is identical to having called next() that often.
    void fill(std::span<std::uint64_t> out);

private:
    static constexpr std::size_t kN = 312;
    static constexpr std::size_t kM = 156;
    static constexpr std::uint64_t kMatrixA = 0xB5026F5AA96619E9ULL;
    static constexpr std::uint64_t kUpperMask = 0xFFFFFFFF80000000ULL;
    static constexpr std::uint64_t kLowerMask = 0x000000007FFFFFFFULL;

    static std::uint64_t temper(std::uint64_t x) {
        x ^= (x >> 29) & 0x5555555555555555ULL;
        x ^= (x << 17) & 0x71D67FFFEDA60000ULL;
        x ^= (x << 37) & 0xFFF7EEE000000000ULL;
        x ^= x >> 43;
        return x;
    }

    void twist();

    std::array<std::uint64_t, kN> state_;
    std::size_t index_ = kN;
};

/// Abstract stream of raw 64-bit draws. Concrete engines sit behind this
/// interface; in on-the-fly mode every draw pays one virtual call, which is
/// exactly the overhead pooling amortizes.
class RandomSource {
public:
    virtual ~RandomSource() = default;
    virtual std::uint64_t raw() = 0;
    virtual void fill(std::span<std::uint64_t> out) = 0;
};

class TwisterSource final : public RandomSource {
public:
    explicit TwisterSource(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t raw() override { return engine_.next(); }
    void fill(std::span<std::uint64_t> out) override { engine_.fill(out); }

private:
    Mt19937x64 engine_;
};

enum class RngAlgorithm { MersenneTwister64 };
enum class RngMode { OnTheFly, Pooled };

struct GeneratorSpec {
    RngAlgorithm algorithm = RngAlgorithm::MersenneTwister64;
    std::uint64_t seed = 0;
    RngMode mode = RngMode::OnTheFly;
    std::size_t pool_size = 1 << 16;  // raw draws per refill when pooled
};

/// Distribution-level interface used throughout the simulator. Virtual so
/// tests can substitute deterministic stubs. Raw-draw consumption per call:
///   next_uniform            1
///   next_index              1
///   next_normal             2 per polar attempt (expected ~2.55), 0 if sigma == 0
///   next_truncated_normal   next_normal repeated until inside bounds, 0 if sigma == 0
class RandomGenerator {
public:
    virtual ~RandomGenerator() = default;

    /// Uniform real in [lo, hi). Throws std::invalid_argument if lo >= hi.
    virtual double next_uniform(double lo, double hi) = 0;

    /// Uniform index in [0, n). Throws std::invalid_argument if n == 0.
    virtual std::size_t next_index(std::size_t n) = 0;

    /// Gaussian(mu, sigma^2) via the polar rejection method; sigma == 0
    /// returns mu without consuming draws. Throws if sigma < 0.
    virtual double next_normal(double mu, double sigma) = 0;

    /// Gaussian(mu, sigma^2) conditioned on [lo, hi] by rejection; never
    /// clipped. Throws if lo >= hi, sigma < 0, or (sigma == 0 and mu
    /// outside [lo, hi]). Gives up after 10^6 rejections.
    virtual double next_truncated_normal(double mu, double sigma, double lo, double hi) = 0;

    /// Raw 64-bit draw from the underlying stream.
    virtual std::uint64_t raw() = 0;

    /// Uniform pick from a non-empty finite set.
    template <typename T>
    T pick(std::span<const T> values) {
        if (values.empty()) throw_empty_set();
        return values[next_index(values.size())];
    }

    /// Fisher-Yates permutation. The swap partner is chosen as
    /// i - next_index(i + 1), so a stub that always returns 0 yields the
    /// identity permutation.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i-- > 1;) {
            const std::size_t j = i - next_index(i + 1);
            std::swap(values[i], values[j]);
        }
    }

private:
    [[noreturn]] static void throw_empty_set();
};

/// Production generator: mt19937-64 behind the RandomSource interface, with
/// on-the-fly or pooled raw-draw delivery. Pooled and on-the-fly modes
/// produce bit-identical variate sequences for the same seed.
class TwisterGenerator final : public RandomGenerator {
public:
    explicit TwisterGenerator(const GeneratorSpec& spec);

    double next_uniform(double lo, double hi) override;
    std::size_t next_index(std::size_t n) override;
    double next_normal(double mu, double sigma) override;
    double next_truncated_normal(double mu, double sigma, double lo, double hi) override;

    std::uint64_t raw() override {
        if (!pooled_) return source_->raw();
        if (cursor_ == pool_.size()) {
            source_->fill(pool_);
            cursor_ = 0;
        }
        return pool_[cursor_++];
    }

    const GeneratorSpec& spec() const { return spec_; }

    /// Regenerates the pool so that it holds the next n raw draws of the
    /// stream. Only meaningful in pooled mode.
    void fill_pool(std::size_t n);

private:
    double unit_uniform() {  // [0, 1), 53-bit resolution
        return static_cast<double>(raw() >> 11) * 0x1.0p-53;
    }

    GeneratorSpec spec_;
    std::unique_ptr<RandomSource> source_;
    bool pooled_ = false;
    std::vector<std::uint64_t> pool_;
    std::size_t cursor_ = 0;
};

std::unique_ptr<RandomGenerator> make_generator(const GeneratorSpec& spec);

/// Maps (master seed, run index) to the seed of that run's private stream.
/// seed_i = splitmix64(master + GOLDEN * (i + 1)); injective in the run
/// index for a fixed master because splitmix64 is a bijection.
std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t run_index);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace abcem
