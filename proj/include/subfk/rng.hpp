/*
 * Reproducible random streams.
 *
 * Every stream is an mt19937_64 seeded from (master seed, stream index)
 * through std::seed_seq, so a stream's draws do not depend on which worker
 * consumes it.
 */
#pragma once

#include <cstdint>
#include <random>

namespace subfk {

class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream);

    double uniform() { return unif_(eng_); }
    // Uniform on (0,1), never 0.
    double uniform_pos();
    double normal() { return norm_(eng_); }
    double exponential() { return expo_(eng_); }
    std::uint64_t poisson(double mean);
    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
    std::normal_distribution<double> norm_{0.0, 1.0};
    std::exponential_distribution<double> expo_{1.0};
};

}  // namespace subfk
