#include "ndkit/rational.hpp"

#include <charconv>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace ndkit {

namespace {

__int128 gcd_wide(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::int64_t parse_int(std::string_view text, std::string_view whole) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw std::invalid_argument("not a rational: '" + std::string(whole) + "'");
    }
    return v;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    *this = from_wide(num, den);
}

Rational Rational::from_wide(__int128 num, __int128 den) {
    if (den == 0) {
        throw std::domain_error("rational with zero denominator");
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    __int128 g = gcd_wide(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    constexpr auto lo = std::numeric_limits<std::int64_t>::min();
    constexpr auto hi = std::numeric_limits<std::int64_t>::max();
    if (num < lo || num > hi || den > hi) {
        throw std::overflow_error("rational overflow");
    }
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
}

Rational Rational::parse(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        return Rational(parse_int(text.substr(0, slash), text), parse_int(text.substr(slash + 1), text));
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        auto int_part = text.substr(0, dot);
        auto frac_part = text.substr(dot + 1);
        bool negative = !int_part.empty() && int_part.front() == '-';
        if (negative) int_part.remove_prefix(1);
        if (frac_part.size() > 18) {
            throw std::invalid_argument("too many decimal places: '" + std::string(text) + "'");
        }
        std::int64_t scale = 1;
        for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
        std::int64_t ip = int_part.empty() ? 0 : parse_int(int_part, text);
        std::int64_t fp = frac_part.empty() ? 0 : parse_int(frac_part, text);
        if (ip < 0 || fp < 0) {
            throw std::invalid_argument("not a rational: '" + std::string(text) + "'");
        }
        Rational r = from_wide(static_cast<__int128>(ip) * scale + fp, scale);
        return negative ? -r : r;
    }
    return Rational(parse_int(text, text));
}

double Rational::to_double() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

std::int64_t Rational::floor() const noexcept {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
}

std::int64_t Rational::ceil() const noexcept {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) ++q;
    return q;
}

Rational Rational::reciprocal() const {
    return from_wide(den_, num_);
}

Rational Rational::operator-() const {
    return from_wide(-static_cast<__int128>(num_), den_);
}

Rational operator+(const Rational& a, const Rational& b) {
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                               static_cast<__int128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
                               static_cast<__int128>(a.den_) * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
    return static_cast<__int128>(a.num_) * b.den_ <=> static_cast<__int128>(b.num_) * a.den_;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
}

}  // namespace ndkit
