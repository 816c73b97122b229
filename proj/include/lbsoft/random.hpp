// Counter-based pseudo-random streams.
//
// A stream is a (key, counter) pair; the n-th output is a SplitMix64
// finalizer applied to key + n * golden.  Keys for independent streams are
// derived from (master seed, stream index) by hashing, so the values a
// particle sees depend only on its index, never on worker count or order.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace lbsoft {

namespace detail {

constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

class RandomStream
{
public:
    using result_type = std::uint64_t;

    constexpr explicit RandomStream(std::uint64_t key) : key_(key) {}

    // Stream number `index` under `master_seed`.
    static constexpr RandomStream derive(std::uint64_t master_seed, std::uint64_t index)
    {
        const std::uint64_t k = detail::mix64(detail::mix64(master_seed + detail::golden_gamma)
                                              ^ (index * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
        return RandomStream(k);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()()
    {
        ++counter_;
        return detail::mix64(key_ + counter_ * detail::golden_gamma);
    }

    // Uniform on the open interval (0,1); never returns 0 or 1.
    double uniform()
    {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Exponential waiting time; +inf for rate 0.
    double exponential(double rate)
    {
        if (rate <= 0.0)
            return std::numeric_limits<double>::infinity();
        return -std::log(uniform()) / rate;
    }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace lbsoft
