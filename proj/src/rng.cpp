#include "subfk/rng.hpp"

namespace subfk {

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32), 0x5eedu};
    eng_.seed(seq);
}

double Rng::uniform_pos()
{
    double u;
    do {
        u = unif_(eng_);
    } while (u <= 0.0);
    return u;
}

std::uint64_t Rng::poisson(double mean)
{
    if (mean <= 0.0) return 0;
    std::poisson_distribution<std::uint64_t> d(mean);
    return d(eng_);
}

}  // namespace subfk
