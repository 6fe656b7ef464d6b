#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace splitsim {

// Power/size unit conventions used throughout:
//   dBm        -> watts:      10^(x/10) mW
//   dBm/Hz     -> W/Hz:       same rule, per hertz
//   MB         -> bits:       1 MB = 2^20 bytes = 2^23 bits
inline double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

inline double dbm_per_hz_to_w_per_hz(double dbm_per_hz) { return dbm_to_watts(dbm_per_hz); }

inline double mb_to_bits(double mb) { return mb * 8388608.0; }  // 2^23

inline double bits_to_mb(double bits) { return bits / 8388608.0; }

inline double mflop_to_flop(double mflop) { return mflop * 1e6; }

/// Exact rational in [0,1] for the aggregation ratio. Keeping the ratio as a
/// rational makes ceil(phi*b) exact at boundaries like phi=0.5, b=64, where a
/// binary-float product could land on either side of an integer.
struct Ratio {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Ratio() = default;
    Ratio(std::int64_t n, std::int64_t d);

    /// ceil(num*b/den) in exact integer arithmetic.
    std::int64_t ceil_mul(std::int64_t b) const;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    bool operator==(const Ratio& o) const { return num * o.den == o.num * den; }
};

/// Parses a non-negative decimal like "0.25", "1", ".5" into an exact Ratio.
Ratio parse_ratio(const std::string& text);

std::string to_string(const Ratio& r);

}  // namespace splitsim
