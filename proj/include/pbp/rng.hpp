#pragma once

#include <array>
#include <cstdint>

namespace pbp {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Stateless: every output block is a pure function of (counter, key), so a
/// draw can be addressed directly without advancing any stream.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) noexcept;
};

/// Address of one Gaussian draw inside the simulation's random field.
struct DrawKey {
    std::uint64_t seed = 0;
    std::uint32_t stream = 0;
    std::uint32_t component = 0;
    std::uint32_t level = 0;
    std::uint32_t index = 0;
};

/// Uniform in the open interval (0, 1) with 53 random bits.
double uniform_open(const DrawKey& key) noexcept;

/// Standard normal by inverse CDF of uniform_open(key).
double standard_normal(const DrawKey& key);

/// Standard normal quantile function; +-inf at 0 and 1, NaN outside [0, 1].
double normal_quantile(double p);

} // namespace pbp
