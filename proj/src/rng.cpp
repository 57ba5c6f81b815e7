#include "spde/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace spde::rng {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& c, const std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    philox_round(ctr, key);
    for (int i = 1; i < 10; ++i) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
        philox_round(ctr, key);
    }
    return ctr;
}

double to_unit_interval(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double normal_inv_cdf(double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("normal_inv_cdf: u in (0,1) required");

    const double q = u - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num = (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0);
        const double den = (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                             4.2313330701600911252e+1) * r + 1.0);
        return q * num / den;
    }

    double r = (q < 0.0) ? u : 1.0 - u;
    r = std::sqrt(-std::log(r));
    double z;
    if (r <= 5.0) {
        r -= 1.6;
        const double num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                                 2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                               3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                             4.63033784615654529590e+0) * r + 1.42343711074968357734e+0);
        const double den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                                 1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                               6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                             2.05319162663775882187e+0) * r + 1.0);
        z = num / den;
    } else {
        r -= 5.0;
        const double num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                                 1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                               2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                             5.46378491116411436990e+0) * r + 6.65790464350110377720e+0);
        const double den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                                 1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                               1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                             5.99832206555887937690e-1) * r + 1.0);
        z = num / den;
    }
    return (q < 0.0) ? -z : z;
}

NormalPair normal_pair(std::uint64_t seed, std::uint64_t stream, std::uint32_t mode,
                       std::uint64_t pair_index) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(pair_index),
        static_cast<std::uint32_t>(pair_index >> 32),
        mode,
        static_cast<std::uint32_t>(stream),
    };
    const std::array<std::uint32_t, 2> key = {
        static_cast<std::uint32_t>(seed) ^ static_cast<std::uint32_t>(stream >> 32),
        static_cast<std::uint32_t>(seed >> 32),
    };
    const auto out = philox4x32(ctr, key);
    const std::uint64_t b0 = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    const std::uint64_t b1 = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    return {normal_inv_cdf(to_unit_interval(b0)), normal_inv_cdf(to_unit_interval(b1))};
}

double normal_at(std::uint64_t seed, std::uint64_t stream, std::uint32_t mode, std::uint64_t step) {
    const NormalPair p = normal_pair(seed, stream, mode, step >> 1);
    return (step & 1u) ? p.second : p.first;
}

}  // namespace spde::rng
