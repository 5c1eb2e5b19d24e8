#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace ndkit {

/// Exact rational number over 64-bit integers.
///
/// Always stored in lowest terms with a positive denominator, so two equal
/// values are also field-wise identical. Intermediate products are formed in
/// 128 bits; a result that does not fit back into 64 bits throws
/// std::overflow_error rather than wrapping.
class Rational {
public:
    constexpr Rational() noexcept = default;
    Rational(std::int64_t value) noexcept : num_(value) {}  // NOLINT(google-explicit-constructor)
    Rational(std::int64_t num, std::int64_t den);

    /// Accepts "p/q", an integer, or a finite decimal such as "0.0207".
    static Rational parse(std::string_view text);

    [[nodiscard]] std::int64_t num() const noexcept { return num_; }
    [[nodiscard]] std::int64_t den() const noexcept { return den_; }

    [[nodiscard]] double to_double() const noexcept;
    /// "p/q", or "p" when the denominator is 1.
    [[nodiscard]] std::string str() const;

    [[nodiscard]] std::int64_t floor() const noexcept;
    [[nodiscard]] std::int64_t ceil() const noexcept;
    [[nodiscard]] bool is_integer() const noexcept { return den_ == 1; }
    [[nodiscard]] Rational reciprocal() const;

    Rational operator-() const;
    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) noexcept = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept;

private:
    static Rational from_wide(__int128 num, __int128 den);

    std::int64_t num_{0};
    std::int64_t den_{1};
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace ndkit
