#include "omtk/rational.hpp"

#include "omtk/error.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <stdexcept>

namespace omtk {

namespace {

using wide = __int128;

wide wide_abs(wide v) { return v < 0 ? -v : v; }

wide wide_gcd(wide a, wide b)
{
    a = wide_abs(a);
    b = wide_abs(b);
    while (b != 0) {
        wide t = a % b;
        a = b;
        b = t;
    }
    return a;
}

bool fits(wide v)
{
    return v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max();
}

[[noreturn]] void overflow()
{
    throw Error(ErrorCode::Overflow, "rational arithmetic exceeded 64-bit range");
}

// a*b with an overflow check on the 128-bit product of two 64-bit-range values
// that may already have been widened once.
wide checked_mul(wide a, wide b)
{
    wide r = 0;
    if (__builtin_mul_overflow(a, b, &r)) {
        overflow();
    }
    return r;
}

} // namespace

Rational::Rational(std::int64_t num, std::int64_t den)
{
    if (den == 0) {
        throw std::domain_error("rational with zero denominator");
    }
    *this = from_wide(num, den);
}

Rational Rational::from_wide(wide num, wide den)
{
    if (den == 0) {
        throw std::domain_error("division by zero");
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    wide g = wide_gcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (!fits(num) || !fits(den)) {
        overflow();
    }
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
}

std::int64_t Rational::floor() const noexcept
{
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) {
        --q;
    }
    return q;
}

std::int64_t Rational::ceil() const noexcept
{
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) {
        ++q;
    }
    return q;
}

Rational Rational::operator-() const
{
    return from_wide(-static_cast<wide>(num_), den_);
}

Rational& Rational::operator+=(const Rational& rhs)
{
    if (den_ == rhs.den_) {
        *this = from_wide(static_cast<wide>(num_) + rhs.num_, den_);
    } else {
        wide n = static_cast<wide>(num_) * rhs.den_ + static_cast<wide>(rhs.num_) * den_;
        wide d = static_cast<wide>(den_) * rhs.den_;
        *this = from_wide(n, d);
    }
    return *this;
}

Rational& Rational::operator-=(const Rational& rhs)
{
    return *this += -rhs;
}

Rational& Rational::operator*=(const Rational& rhs)
{
    if (num_ == 0 || rhs.num_ == 0) {
        *this = Rational{};
        return *this;
    }
    // Cross-reduce first so intermediate products stay small.
    wide g1 = wide_gcd(num_, rhs.den_);
    wide g2 = wide_gcd(rhs.num_, den_);
    wide n = checked_mul(num_ / g1, rhs.num_ / g2);
    wide d = checked_mul(den_ / g2, rhs.den_ / g1);
    *this = from_wide(n, d);
    return *this;
}

Rational& Rational::operator/=(const Rational& rhs)
{
    if (rhs.num_ == 0) {
        throw std::domain_error("division by zero");
    }
    Rational inv;
    inv.num_ = rhs.den_;
    inv.den_ = rhs.num_;
    if (inv.den_ < 0) {
        inv.num_ = -inv.num_;
        inv.den_ = -inv.den_;
    }
    return *this *= inv;
}

std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs) noexcept
{
    wide a = static_cast<wide>(lhs.num_) * rhs.den_;
    wide b = static_cast<wide>(rhs.num_) * lhs.den_;
    return a <=> b;
}

std::string Rational::to_string() const
{
    if (den_ == 1) {
        return std::to_string(num_);
    }
    return std::to_string(num_) + "/" + std::to_string(den_);
}

std::optional<std::string> Rational::to_decimal(int max_significant) const
{
    // Terminating iff the reduced denominator has only factors 2 and 5.
    std::int64_t d = den_;
    int twos = 0;
    int fives = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++twos;
    }
    while (d % 5 == 0) {
        d /= 5;
        ++fives;
    }
    if (d != 1) {
        return std::nullopt;
    }
    int scale = std::max(twos, fives);
    if (scale > 30) {
        return std::nullopt;
    }
    // value = num * 10^scale / den, an integer
    wide factor = 1;
    for (int i = 0; i < scale; ++i) {
        factor *= 10;
    }
    wide scaled = 0;
    if (__builtin_mul_overflow(wide_abs(num_), factor / den_, &scaled)) {
        return std::nullopt;
    }
    std::string digits;
    if (scaled == 0) {
        digits = "0";
    }
    while (scaled > 0) {
        digits.push_back(static_cast<char>('0' + static_cast<int>(scaled % 10)));
        scaled /= 10;
    }
    std::reverse(digits.begin(), digits.end());
    auto first_nonzero = digits.find_first_not_of('0');
    std::size_t significant = first_nonzero == std::string::npos ? 1 : digits.size() - first_nonzero;
    if (static_cast<int>(significant) > max_significant) {
        return std::nullopt;
    }
    if (scale > 0) {
        if (static_cast<int>(digits.size()) <= scale) {
            digits.insert(0, static_cast<std::size_t>(scale) - digits.size() + 1, '0');
        }
        digits.insert(digits.size() - static_cast<std::size_t>(scale), 1, '.');
    }
    if (num_ < 0) {
        digits.insert(0, 1, '-');
    }
    return digits;
}

std::optional<Rational> Rational::parse(std::string_view text)
{
    auto parse_int = [](std::string_view s) -> std::optional<std::int64_t> {
        if (s.empty()) {
            return std::nullopt;
        }
        if (s.front() == '+') {
            s.remove_prefix(1);
        }
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) {
            return std::nullopt;
        }
        return v;
    };

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto n = parse_int(text.substr(0, slash));
        auto d = parse_int(text.substr(slash + 1));
        if (!n || !d || *d == 0) {
            return std::nullopt;
        }
        return Rational(*n, *d);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view int_part = text.substr(0, dot);
        std::string_view frac_part = text.substr(dot + 1);
        bool negative = !int_part.empty() && int_part.front() == '-';
        if (!int_part.empty() && (int_part.front() == '-' || int_part.front() == '+')) {
            int_part.remove_prefix(1);
        }
        if ((int_part.empty() && frac_part.empty()) || frac_part.size() > 18) {
            return std::nullopt;
        }
        for (char c : frac_part) {
            if (c < '0' || c > '9') {
                return std::nullopt;
            }
        }
        std::int64_t whole = 0;
        if (!int_part.empty()) {
            auto w = parse_int(int_part);
            if (!w || int_part.front() == '-') {
                return std::nullopt;
            }
            whole = *w;
        }
        std::int64_t frac = 0;
        std::int64_t scale = 1;
        for (char c : frac_part) {
            frac = frac * 10 + (c - '0');
            scale *= 10;
        }
        Rational r = Rational(whole) + Rational(frac, scale);
        return negative ? -r : r;
    }
    if (auto v = parse_int(text)) {
        return Rational(*v);
    }
    return std::nullopt;
}

std::ostream& operator<<(std::ostream& os, const Rational& value)
{
    return os << value.to_string();
}

} // namespace omtk
