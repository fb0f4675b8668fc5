#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ephs::detail {

/// Van der Corput radical inverse in the given base.
inline double radical_inverse(std::uint64_t index, std::uint64_t base)
{
    double inv_base = 1.0 / static_cast<double>(base);
    double factor = inv_base;
    double value = 0.0;
    while (index > 0) {
        value += static_cast<double>(index % base) * factor;
        index /= base;
        factor *= inv_base;
    }
    return value;
}

/// Low-discrepancy Halton points in [0,1)^dim. The seed offsets the start
/// index, so a fixed seed yields a reproducible sequence.
class HaltonSampler {
public:
    HaltonSampler(std::size_t dim, std::uint64_t seed) : dim_(dim), index_(11 + 127 * seed)
    {
    }

    std::vector<double> next()
    {
        static constexpr std::uint64_t primes[] = {
            2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,
            43,  47,  53,  59,  61,  67,  71,  73,  79,  83,  89,  97,  101,
            103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167,
            173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233, 239,
            241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311};
        constexpr std::size_t n_primes = sizeof(primes) / sizeof(primes[0]);
        std::vector<double> point(dim_);
        for (std::size_t d = 0; d < dim_; ++d)
            point[d] = radical_inverse(index_ + 7 * (d / n_primes), primes[d % n_primes]);
        ++index_;
        return point;
    }

private:
    std::size_t dim_;
    std::uint64_t index_;
};

} // namespace ephs::detail
