// Copyright 2026 The rsched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RSCHED_FIXED_HPP
#define RSCHED_FIXED_HPP

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace rsched {

/// Exact dyadic rational `raw / 2^24`.
///
/// QUBO coefficients are kept in this form so that energies are compared
/// and accumulated without rounding: sums and integer multiples are exact,
/// and every value has a finite decimal expansion for export. Values that
/// come from floating point (the logistic maintenance weight) are rounded
/// once, to the nearest multiple of 2^-24, when they enter the model.
template <class Rep>
class BasicFixed {
 public:
  static constexpr int kFractionBits = 24;
  static constexpr Rep kOne = Rep{1} << kFractionBits;

  constexpr BasicFixed() = default;
  constexpr BasicFixed(std::int64_t integer)  // NOLINT: implicit on purpose
      : raw_(static_cast<Rep>(integer) * kOne) {}

  template <class Other>
  constexpr explicit BasicFixed(BasicFixed<Other> other)
      : raw_(static_cast<Rep>(other.raw())) {}

  static constexpr BasicFixed fromRaw(Rep raw) {
    BasicFixed f;
    f.raw_ = raw;
    return f;
  }

  static BasicFixed fromDouble(double value) {
    if (!std::isfinite(value)) throw std::domain_error("fixed: non-finite value");
    return fromRaw(static_cast<Rep>(std::llround(std::ldexp(value, kFractionBits))));
  }

  constexpr Rep raw() const { return raw_; }
  double toDouble() const { return std::ldexp(static_cast<double>(raw_), -kFractionBits); }
  constexpr bool isZero() const { return raw_ == 0; }

  constexpr BasicFixed operator-() const { return fromRaw(-raw_); }
  constexpr BasicFixed& operator+=(BasicFixed o) { raw_ += o.raw_; return *this; }
  constexpr BasicFixed& operator-=(BasicFixed o) { raw_ -= o.raw_; return *this; }
  constexpr BasicFixed& operator*=(std::int64_t k) { raw_ *= static_cast<Rep>(k); return *this; }
  friend constexpr BasicFixed operator+(BasicFixed a, BasicFixed b) { return a += b; }
  friend constexpr BasicFixed operator-(BasicFixed a, BasicFixed b) { return a -= b; }
  friend constexpr BasicFixed operator*(BasicFixed a, std::int64_t k) { return a *= k; }
  friend constexpr BasicFixed operator*(std::int64_t k, BasicFixed a) { return a *= k; }

  friend constexpr bool operator==(BasicFixed a, BasicFixed b) = default;
  friend constexpr auto operator<=>(BasicFixed a, BasicFixed b) { return a.raw_ <=> b.raw_; }

  /// Shortest exact decimal representation ("-12.5", "0.000000059604644775390625").
  std::string toString() const {
    using U = std::make_unsigned_t<Rep>;
    const bool negative = raw_ < 0;
    U magnitude = negative ? U(0) - static_cast<U>(raw_) : static_cast<U>(raw_);
    U integer = magnitude >> kFractionBits;
    U fraction = magnitude & (static_cast<U>(kOne) - 1);

    std::string digits;
    do {
      digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(integer % 10)));
      integer /= 10;
    } while (integer != 0);
    if (fraction != 0) {
      // fraction / 2^24 == fraction * 5^24 / 10^24
      unsigned __int128 scaled = static_cast<unsigned __int128>(fraction) * pow5();
      std::string frac(kFractionBits, '0');
      for (int i = kFractionBits - 1; i >= 0; --i) {
        frac[static_cast<std::size_t>(i)] = static_cast<char>('0' + static_cast<int>(scaled % 10));
        scaled /= 10;
      }
      while (!frac.empty() && frac.back() == '0') frac.pop_back();
      digits += '.';
      digits += frac;
    }
    return negative ? "-" + digits : digits;
  }

  /// Inverse of toString(); rejects values that are not multiples of 2^-24.
  static std::optional<BasicFixed> parse(std::string_view text) {
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
      negative = text.front() == '-';
      text.remove_prefix(1);
    }
    if (text.empty()) return std::nullopt;
    const auto dot = text.find('.');
    const std::string_view intPart = text.substr(0, dot);
    const std::string_view fracPart = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (intPart.empty() || fracPart.size() > static_cast<std::size_t>(kFractionBits)) return std::nullopt;
    if (dot != std::string_view::npos && fracPart.empty()) return std::nullopt;

    __int128 integer = 0;
    for (char c : intPart) {
      if (c < '0' || c > '9') return std::nullopt;
      integer = integer * 10 + (c - '0');
      if (integer > (static_cast<__int128>(1) << 100)) return std::nullopt;
    }
    __int128 fraction = 0;
    __int128 scale = 1;
    for (char c : fracPart) {
      if (c < '0' || c > '9') return std::nullopt;
      fraction = fraction * 10 + (c - '0');
      scale *= 10;
    }
    const __int128 numerator = fraction * static_cast<__int128>(kOne);
    if (numerator % scale != 0) return std::nullopt;
    __int128 raw = integer * static_cast<__int128>(kOne) + numerator / scale;
    if (negative) raw = -raw;
    if constexpr (sizeof(Rep) < sizeof(__int128)) {
      if (raw > static_cast<__int128>(std::numeric_limits<Rep>::max()) ||
          raw < static_cast<__int128>(std::numeric_limits<Rep>::min()))
        return std::nullopt;
    }
    return fromRaw(static_cast<Rep>(raw));
  }

 private:
  static constexpr unsigned __int128 pow5() {
    unsigned __int128 p = 1;
    for (int i = 0; i < kFractionBits; ++i) p *= 5;
    return p;
  }

  Rep raw_ = 0;
};

/// A single QUBO coefficient.
using Coeff = BasicFixed<std::int64_t>;
/// Accumulated energies; wide enough for any sum of coefficients we store.
using Energy = BasicFixed<__int128>;

inline Energy toEnergy(Coeff c) { return Energy::fromRaw(c.raw()); }

}  // namespace rsched

#endif  // RSCHED_FIXED_HPP
