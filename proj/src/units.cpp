#include "splitsim/units.hpp"

#include <numeric>

namespace splitsim {

Ratio::Ratio(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den <= 0) throw std::invalid_argument("Ratio: denominator must be positive");
    if (num < 0) throw std::invalid_argument("Ratio: negative value");
    const std::int64_t g = std::gcd(num, den);
    num /= g;
    den /= g;
}

std::int64_t Ratio::ceil_mul(std::int64_t b) const {
    if (b < 0) throw std::invalid_argument("Ratio::ceil_mul: negative multiplier");
    return (num * b + den - 1) / den;
}

Ratio parse_ratio(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw std::invalid_argument("empty ratio");

    const auto dot = s.find('.');
    std::string ipart = dot == std::string::npos ? s : s.substr(0, dot);
    std::string fpart = dot == std::string::npos ? "" : s.substr(dot + 1);
    if (ipart.empty()) ipart = "0";
    for (char c : ipart + fpart)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw std::invalid_argument("bad ratio literal: " + text);
    if (fpart.size() > 15) throw std::invalid_argument("ratio literal too long: " + text);

    std::int64_t den = 1;
    for (std::size_t i = 0; i < fpart.size(); ++i) den *= 10;
    const std::int64_t num = std::stoll(ipart) * den + (fpart.empty() ? 0 : std::stoll(fpart));
    return Ratio(num, den);
}

std::string to_string(const Ratio& r) {
    if (r.den == 1) return std::to_string(r.num);
    return std::to_string(r.num) + "/" + std::to_string(r.den);
}

}  // namespace splitsim
