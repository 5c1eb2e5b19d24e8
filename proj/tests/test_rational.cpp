#include <doctest.h>

#include <random>
#include <sstream>
#include <stdexcept>

#include "ndkit/rational.hpp"

using ndkit::Rational;

TEST_CASE("rational normalises sign and common factors") {
    CHECK(Rational(6, -8) == Rational(-3, 4));
    CHECK(Rational(6, -8).den() == 4);
    CHECK(Rational(0, 5) == Rational(0));
    CHECK(Rational(0, 5).den() == 1);
    CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
}

TEST_CASE("rational parse") {
    CHECK(Rational::parse("3/10") == Rational(3, 10));
    CHECK(Rational::parse("-7") == Rational(-7));
    CHECK(Rational::parse("0.0207") == Rational(207, 10000));
    CHECK(Rational::parse(" 1/4 ") == Rational(1, 4));
    CHECK_THROWS(Rational::parse("1/0"));
    CHECK_THROWS(Rational::parse("abc"));
    CHECK_THROWS(Rational::parse("1/"));
    CHECK_THROWS(Rational::parse(""));
}

TEST_CASE("rational floor, ceil and printing") {
    CHECK(Rational(10, 3).ceil() == 4);
    CHECK(Rational(10, 3).floor() == 3);
    CHECK(Rational(-10, 3).floor() == -4);
    CHECK(Rational(-10, 3).ceil() == -3);
    CHECK(Rational(6, 3).ceil() == 2);
    CHECK(Rational(3, 25).str() == "3/25");
    CHECK(Rational(4, 2).str() == "2");
    std::ostringstream os;
    os << Rational(-1, 2);
    CHECK(os.str() == "-1/2");
}

TEST_CASE("rational overflow throws instead of wrapping") {
    const Rational big(std::int64_t{1} << 62);
    CHECK_THROWS_AS(big * big, std::overflow_error);
}

TEST_CASE("rational field identities hold on random operands") {
    std::mt19937_64 gen(7);
    std::uniform_int_distribution<std::int64_t> num(-1000, 1000);
    std::uniform_int_distribution<std::int64_t> den(1, 1000);
    for (int i = 0; i < 2000; ++i) {
        const Rational a(num(gen), den(gen));
        const Rational b(num(gen), den(gen));
        const Rational c(num(gen), den(gen));
        CHECK(a + b == b + a);
        CHECK((a + b) + c == a + (b + c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a - a == Rational(0));
        if (b != Rational(0)) CHECK((a / b) * b == a);
        CHECK((a < b) == ((a - b).num() < 0));
    }
}
