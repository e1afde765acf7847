#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace omtk {

/// Exact rational number in lowest terms with a positive denominator.
///
/// Numerator and denominator are 64-bit; every operation is carried out in
/// 128-bit intermediates and reduced. A result that does not fit throws
/// Error{Overflow}, so a value is either exact or absent.
class Rational {
public:
    constexpr Rational() noexcept = default;
    constexpr Rational(std::int64_t value) noexcept : num_(value) {} // NOLINT(implicit)
    Rational(std::int64_t num, std::int64_t den);

    [[nodiscard]] constexpr std::int64_t num() const noexcept { return num_; }
    [[nodiscard]] constexpr std::int64_t den() const noexcept { return den_; }

    [[nodiscard]] constexpr bool is_integer() const noexcept { return den_ == 1; }
    [[nodiscard]] constexpr bool is_zero() const noexcept { return num_ == 0; }
    [[nodiscard]] constexpr int sign() const noexcept { return (num_ > 0) - (num_ < 0); }

    [[nodiscard]] std::int64_t floor() const noexcept;
    [[nodiscard]] std::int64_t ceil() const noexcept;

    Rational operator-() const;
    Rational& operator+=(const Rational& rhs);
    Rational& operator-=(const Rational& rhs);
    Rational& operator*=(const Rational& rhs);
    Rational& operator/=(const Rational& rhs);

    friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
    friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
    friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
    friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }

    friend constexpr bool operator==(const Rational&, const Rational&) noexcept = default;
    friend std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs) noexcept;

    /// "p" for integers, "p/q" otherwise.
    [[nodiscard]] std::string to_string() const;

    /// Shortest exact decimal rendering ("0.25", "-3", "12.5"), or nullopt if
    /// the expansion does not terminate or needs more than `max_significant` digits.
    [[nodiscard]] std::optional<std::string> to_decimal(int max_significant = 15) const;

    /// Accepts "p", "p/q" and plain decimals such as "-1.25" (no exponent).
    static std::optional<Rational> parse(std::string_view text);

private:
    static Rational from_wide(__int128 num, __int128 den);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& value);

} // namespace omtk

template <>
struct std::hash<omtk::Rational> {
    std::size_t operator()(const omtk::Rational& r) const noexcept
    {
        return std::hash<std::int64_t>{}(r.num()) * 31u + std::hash<std::int64_t>{}(r.den());
    }
};
