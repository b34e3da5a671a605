#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>

namespace maxlab {

// Nonnegative rational num/den with den > 0, used by the exact backend to
// represent averages (integer mass over integer area). Ordering is exact
// through 128-bit cross multiplication; no arithmetic beyond construction is
// needed by the maximal operators.
class Fraction {
public:
    constexpr Fraction() = default;
    constexpr Fraction(std::int64_t num, std::int64_t den = 1) : num_(num), den_(den) {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    /// Skips gcd reduction; den must be positive.
    static constexpr Fraction unreduced(std::int64_t num, std::int64_t den) {
        Fraction f;
        f.num_ = num;
        f.den_ = den;
        return f;
    }

    constexpr std::int64_t num() const { return num_; }
    constexpr std::int64_t den() const { return den_; }
    constexpr double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend constexpr std::strong_ordering operator<=>(const Fraction& a, const Fraction& b) {
        const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
        const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
    friend constexpr bool operator==(const Fraction& a, const Fraction& b) {
        return (a <=> b) == std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Fraction& f) {
        return os << f.num_ << '/' << f.den_;
    }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace maxlab
