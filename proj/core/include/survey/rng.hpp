#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace survey {

// Seedable, splittable RNG. One root seed flows through the whole pipeline;
// independent streams are derived by hashing a label into the root state, so
// parallel consumers stay reproducible regardless of execution order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix(seed)), seed_hash_(seed ^ 0xcbf29ce484222325ULL) {}

    // Derive an independent child stream for the given label.
    Rng split(std::string_view label) const {
        std::uint64_t h = seed_hash_;
        for (char c : label) {
            h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
            h *= 0x100000001b3ULL;
        }
        return Rng(h, true);
    }
    Rng split(std::uint64_t index) const {
        return Rng(seed_hash_ ^ (0x9e3779b97f4a7c15ULL + index * 0xbf58476d1ce4e5b9ULL), true);
    }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    // Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }
    double gaussian(double mean, double stddev) {
        return std::normal_distribution<double>(mean, stddev)(engine_);
    }
    int poisson(double rate) {
        if (rate <= 0.0) return 0;
        return std::poisson_distribution<int>(rate)(engine_);
    }
    bool bernoulli(double p) { return std::bernoulli_distribution(p)(engine_); }

    std::mt19937_64& engine() { return engine_; }

private:
    Rng(std::uint64_t mixed, bool) : engine_(splitmix(mixed)), seed_hash_(mixed) {}

    static std::uint64_t splitmix_step(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static std::mt19937_64 splitmix(std::uint64_t seed) {
        std::uint64_t s = seed;
        std::seed_seq seq{splitmix_step(s), splitmix_step(s), splitmix_step(s), splitmix_step(s)};
        return std::mt19937_64(seq);
    }

    std::mt19937_64 engine_;
    std::uint64_t seed_hash_ = 0;
};

}  // namespace survey
