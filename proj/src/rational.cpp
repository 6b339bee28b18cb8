#include "translab/rational.hpp"

#include <cctype>
#include <cstdlib>

namespace translab {

namespace {

constexpr __int128 kInt64Max = INT64_MAX;
constexpr __int128 kInt64Min = INT64_MIN;

__int128 abs128(__int128 v) { return v < 0 ? -v : v; }

__int128 gcd128(__int128 a, __int128 b) {
    a = abs128(a);
    b = abs128(b);
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::int64_t narrow(__int128 v) {
    if (v > kInt64Max || v < kInt64Min) {
        throw std::overflow_error("rational overflow");
    }
    return static_cast<std::int64_t>(v);
}

}  // namespace

void Rational::assign(std::int64_t num, std::int64_t den) {
    *this = reduce(static_cast<__int128>(num), static_cast<__int128>(den));
}

Rational Rational::reduce(__int128 num, __int128 den) {
    if (den == 0) {
        throw std::domain_error("rational with zero denominator");
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    if (num == 0) {
        den = 1;
    } else {
        __int128 g = gcd128(num, den);
        num /= g;
        den /= g;
    }
    Rational r;
    r.num_ = narrow(num);
    r.den_ = narrow(den);
    return r;
}

Rational Rational::operator+(const Rational& o) const {
    return reduce(static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_,
                  static_cast<__int128>(den_) * o.den_);
}

Rational Rational::operator-(const Rational& o) const {
    return reduce(static_cast<__int128>(num_) * o.den_ - static_cast<__int128>(o.num_) * den_,
                  static_cast<__int128>(den_) * o.den_);
}

Rational Rational::operator*(const Rational& o) const {
    return reduce(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
}

Rational Rational::operator/(const Rational& o) const {
    if (o.num_ == 0) {
        throw std::domain_error("rational division by zero");
    }
    return reduce(static_cast<__int128>(num_) * o.den_, static_cast<__int128>(den_) * o.num_);
}

std::strong_ordering Rational::operator<=>(const Rational& o) const {
    __int128 lhs = static_cast<__int128>(num_) * o.den_;
    __int128 rhs = static_cast<__int128>(o.num_) * den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

Rational Rational::from_string(const std::string& text) {
    if (text.empty()) {
        throw std::invalid_argument("empty rational literal");
    }
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::size_t pos_a = 0;
        std::size_t pos_b = 0;
        std::int64_t n = std::stoll(text.substr(0, slash), &pos_a);
        std::int64_t d = std::stoll(text.substr(slash + 1), &pos_b);
        if (pos_a != slash || pos_b != text.size() - slash - 1) {
            throw std::invalid_argument("bad rational literal: " + text);
        }
        return Rational(n, d);
    }

    // Decimal with optional exponent: sign digits [. digits] [e sign digits]
    std::size_t i = 0;
    bool negative = false;
    if (text[i] == '+' || text[i] == '-') {
        negative = text[i] == '-';
        ++i;
    }
    __int128 mantissa = 0;
    int frac_digits = 0;
    bool seen_digit = false;
    bool in_fraction = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') {
            if (in_fraction) throw std::invalid_argument("bad rational literal: " + text);
            in_fraction = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            seen_digit = true;
            mantissa = mantissa * 10 + (c - '0');
            if (mantissa > kInt64Max) throw std::overflow_error("rational literal too long: " + text);
            if (in_fraction) ++frac_digits;
        } else if (c == 'e' || c == 'E') {
            break;
        } else {
            throw std::invalid_argument("bad rational literal: " + text);
        }
    }
    if (!seen_digit) {
        throw std::invalid_argument("bad rational literal: " + text);
    }
    int exponent = 0;
    if (i < text.size()) {
        std::size_t pos = 0;
        exponent = std::stoi(text.substr(i + 1), &pos);
        if (pos != text.size() - i - 1) {
            throw std::invalid_argument("bad rational literal: " + text);
        }
    }
    if (negative) mantissa = -mantissa;

    int power = exponent - frac_digits;
    __int128 num = mantissa;
    __int128 den = 1;
    for (int k = 0; k < power; ++k) {
        num *= 10;
        if (abs128(num) > kInt64Max) throw std::overflow_error("rational literal too large: " + text);
    }
    for (int k = 0; k < -power; ++k) {
        den *= 10;
        if (den > kInt64Max) throw std::overflow_error("rational literal too small: " + text);
    }
    return reduce(num, den);
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

std::string Rational::decimal(int digits) const {
    __int128 num = num_;
    bool negative = num < 0;
    if (negative) num = -num;
    __int128 whole = num / den_;
    __int128 rem = num % den_;
    std::string out = negative && (whole != 0 || rem != 0) ? "-" : "";
    {
        // __int128 to string, small values only in practice
        std::string w;
        if (whole == 0) w = "0";
        while (whole > 0) {
            w.insert(w.begin(), static_cast<char>('0' + static_cast<int>(whole % 10)));
            whole /= 10;
        }
        out += w;
    }
    if (rem == 0) return out;
    out += '.';
    std::string frac;
    for (int k = 0; k < digits && rem != 0; ++k) {
        rem *= 10;
        frac += static_cast<char>('0' + static_cast<int>(rem / den_));
        rem %= den_;
    }
    if (rem != 0) {
        // round half-up on the digit after the cut
        rem *= 10;
        if (rem / den_ >= 5) {
            int k = static_cast<int>(frac.size()) - 1;
            while (k >= 0) {
                if (frac[k] != '9') {
                    ++frac[k];
                    break;
                }
                frac[k] = '0';
                --k;
            }
            if (k < 0) {
                // carry into the integer part
                std::size_t dot = out.find('.');
                std::string whole_part = out.substr(0, dot);
                bool neg = !whole_part.empty() && whole_part[0] == '-';
                std::string digits_only = neg ? whole_part.substr(1) : whole_part;
                int j = static_cast<int>(digits_only.size()) - 1;
                while (j >= 0) {
                    if (digits_only[j] != '9') {
                        ++digits_only[j];
                        break;
                    }
                    digits_only[j] = '0';
                    --j;
                }
                if (j < 0) digits_only.insert(digits_only.begin(), '1');
                out = (neg ? "-" : "") + digits_only + ".";
            }
        }
    }
    // trim trailing zeros
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    if (frac.empty()) {
        out.pop_back();  // drop the '.'
        return out;
    }
    return out + frac;
}

}  // namespace translab
