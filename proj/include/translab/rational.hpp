#pragma once

#include <cstdint>
#include <compare>
#include <numeric>
#include <stdexcept>
#include <string>

namespace translab {

// Exact rational arithmetic on 64-bit integers. Denominator is always
// positive and the value is kept in lowest terms. Intermediates run through
// 128-bit integers; a result that does not fit in 64 bits throws
// std::overflow_error instead of silently wrapping. Metric aggregation is
// required to be exact, so there is deliberately no implicit conversion
// from floating point.
class Rational {
  public:
    constexpr Rational() = default;
    explicit constexpr Rational(std::int64_t num) : num_(num) {}
    Rational(std::int64_t num, std::int64_t den) { assign(num, den); }
    static Rational from_int(std::int64_t v) { return Rational(v, 1); }

    // Parses "3", "-0.25", "3e-6", "1.5e2" or "num/den" exactly.
    static Rational from_string(const std::string& text);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;
    Rational& operator+=(const Rational& o) { return *this = *this + o; }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    std::strong_ordering operator<=>(const Rational& o) const;

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    // "num/den" (or plain integer when den == 1).
    std::string str() const;
    // Decimal expansion, exact when terminating, otherwise rounded half-up
    // to `digits` fractional digits. Deterministic across platforms.
    std::string decimal(int digits = 12) const;

  private:
    void assign(std::int64_t num, std::int64_t den);
    static Rational reduce(__int128 num, __int128 den);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline Rational operator/(std::int64_t a, const Rational& b) { return Rational(a, 1) / b; }

}  // namespace translab
