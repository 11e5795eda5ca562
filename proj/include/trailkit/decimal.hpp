#pragma once

#include <cstdint>
#include <string>

#include "trailkit/errors.hpp"

namespace trailkit {

/// Fixed-point decimal with 9 fractional digits, for currency arithmetic.
/// Addition is exact; division rounds half-up at the 9th place. Display
/// rounding is half-up at the requested number of places.
class Decimal {
  public:
    static constexpr int64_t kScale = 1000000000;  // 10^9

    Decimal() = default;
    static Decimal from_nanos(int64_t nanos) {
        Decimal d;
        d.nanos_ = nanos;
        return d;
    }

    /// Parses "123", "0.886", "-1.5". More than 9 fractional digits is an error.
    static Decimal parse(const std::string& text);

    int64_t nanos() const { return nanos_; }
    bool is_zero() const { return nanos_ == 0; }
    bool is_negative() const { return nanos_ < 0; }

    Decimal operator+(Decimal o) const { return from_nanos(nanos_ + o.nanos_); }
    Decimal operator-(Decimal o) const { return from_nanos(nanos_ - o.nanos_); }

    /// Half-up division; divisor must be nonzero.
    Decimal operator/(Decimal o) const;

    bool operator==(const Decimal&) const = default;
    auto operator<=>(const Decimal&) const = default;

    /// Full-precision string, trailing zeros trimmed ("3.221818182", "0").
    std::string to_string() const;

    /// Half-up rounded to `places` fractional digits ("550.75").
    std::string to_display_string(int places) const;

  private:
    int64_t nanos_ = 0;
};

}  // namespace trailkit
