#include "doctest.h"
#include "splitsim/units.hpp"

using namespace splitsim;

TEST_CASE("dbm conversions hit the documented operating points") {
    CHECK(dbm_to_watts(31.76) == doctest::Approx(1.4997).epsilon(1e-4));
    CHECK(dbm_to_watts(36.99) == doctest::Approx(5.000).epsilon(1e-4));
    CHECK(dbm_per_hz_to_w_per_hz(-50.0) == doctest::Approx(1e-8).epsilon(1e-12));
    CHECK(dbm_per_hz_to_w_per_hz(-174.0) == doctest::Approx(3.981e-21).epsilon(1e-4));
    CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3));
}

TEST_CASE("megabyte-to-bit conversion uses 2^20-byte megabytes") {
    CHECK(mb_to_bits(0.25) == doctest::Approx(2097152.0));
    CHECK(mb_to_bits(0.0625) == doctest::Approx(524288.0));
    CHECK(bits_to_mb(mb_to_bits(0.1411)) == doctest::Approx(0.1411));
}

TEST_CASE("ratio parses decimals exactly") {
    CHECK(parse_ratio("0.5") == Ratio(1, 2));
    CHECK(parse_ratio("0.25") == Ratio(1, 4));
    CHECK(parse_ratio("1") == Ratio(1, 1));
    CHECK(parse_ratio("0") == Ratio(0, 1));
    CHECK(parse_ratio(".125") == Ratio(1, 8));
    CHECK_THROWS_AS(parse_ratio("abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_ratio(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_ratio("-0.5"), std::invalid_argument);
}

TEST_CASE("ceil of phi*b is exact at boundaries") {
    CHECK(Ratio(1, 2).ceil_mul(64) == 32);
    CHECK(Ratio(1, 2).ceil_mul(3) == 2);
    CHECK(Ratio(0, 1).ceil_mul(64) == 0);
    CHECK(Ratio(1, 1).ceil_mul(64) == 64);
    CHECK(Ratio(1, 3).ceil_mul(64) == 22);  // 64/3 = 21.33..
    CHECK(parse_ratio("0.1").ceil_mul(10) == 1);
    // A float phi = 0.1 could land 0.1*b on either side of the integer; the
    // rational form cannot.
    for (int b = 1; b <= 1000; ++b) CHECK(parse_ratio("0.1").ceil_mul(10 * b) == b);
}
