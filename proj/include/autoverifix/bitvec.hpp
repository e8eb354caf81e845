// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace autoverifix {

inline constexpr unsigned kMaxPortWidth = 64;

/// Fixed-width unsigned bit vector, at most 64 bits wide.
///
/// A vector may also hold the X-state marker, which stands for any value a
/// four-state simulator printed with x/z digits. The marker never compares
/// equal to a known value; see `same_value`.
class BitVec {
 public:
  BitVec() = default;

  /// Throws Errc::invalid_argument for a bad width and Errc::overflow when
  /// `value` does not fit.
  BitVec(unsigned width, std::uint64_t value);

  static BitVec unknown(unsigned width);

  unsigned width() const noexcept { return width_; }
  bool is_unknown() const noexcept { return unknown_; }
  /// Zero for the X marker.
  std::uint64_t value() const noexcept { return value_; }

  /// Largest value representable in `width` bits.
  static std::uint64_t mask(unsigned width) noexcept {
    return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
  }

  friend bool operator==(const BitVec&, const BitVec&) = default;

 private:
  unsigned width_ = 1;
  std::uint64_t value_ = 0;
  bool unknown_ = false;
};

/// Functional equality used for trace comparison: both values known and equal.
/// Widths are not compared.
inline bool same_value(const BitVec& a, const BitVec& b) noexcept {
  return !a.is_unknown() && !b.is_unknown() && a.value() == b.value();
}

/// Parses simulator or literal text into a vector of `width` bits.
///
/// Accepted forms (case-insensitive, `_` separators allowed):
///   0b1010, 0x1f, 0d31, Verilog sized literals (5'h1f, 4'b1010, 8'd200),
///   and bare hex as printed by `%h` (so "20" is 0x20).
/// Any x/z digit yields `BitVec::unknown(width)`.
BitVec parse_bitvec(std::string_view text, unsigned width);

/// Bare hex only, exactly as `%h` prints it. Unlike `parse_bitvec`, a
/// leading "0b" or "0d" is read as hex digits.
BitVec parse_hex_bitvec(std::string_view text, unsigned width);

/// `%h`-style rendering: lowercase hex zero-padded to ceil(width/4) digits,
/// or "x" for the unknown marker. Inverse of `parse_hex_bitvec`.
std::string format_bitvec(const BitVec& v);

/// Verilog sized literal, e.g. 5'h1f. The unknown marker renders as 5'hx.
std::string verilog_literal(const BitVec& v);

}  // namespace autoverifix
