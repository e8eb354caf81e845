// SPDX-License-Identifier: Apache-2.0
#include "autoverifix/bitvec.hpp"

#include <cctype>
#include <fmt/format.h>
#include <optional>

#include "autoverifix/error.hpp"

namespace autoverifix {

namespace {

void check_width(unsigned width) {
  if (width == 0 || width > kMaxPortWidth)
    throw Error(Errc::invalid_argument,
                fmt::format("bit width {} outside [1, {}]", width, kMaxPortWidth));
}

std::optional<unsigned> digit_value(char c) {
  if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
  if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
  return std::nullopt;
}

std::string lowered(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

}  // namespace

BitVec::BitVec(unsigned width, std::uint64_t value) : width_(width), value_(value) {
  check_width(width);
  if (value > mask(width))
    throw Error(Errc::overflow, fmt::format("value {} does not fit in {} bits", value, width));
}

BitVec BitVec::unknown(unsigned width) {
  check_width(width);
  BitVec v;
  v.width_ = width;
  v.unknown_ = true;
  return v;
}

BitVec parse_bitvec(std::string_view raw, unsigned width) {
  check_width(width);
  const std::string original(raw);
  std::string text = lowered(raw);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
  std::size_t start = 0;
  while (start < text.size() && std::isspace(static_cast<unsigned char>(text[start]))) ++start;
  std::string_view body = std::string_view(text).substr(start);

  unsigned radix = 16;
  if (auto tick = body.find('\''); tick != std::string_view::npos) {
    // Verilog sized/unsized literal; the size prefix is informational only.
    for (char c : body.substr(0, tick))
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw Error(Errc::malformed, fmt::format("malformed literal '{}'", original));
    body.remove_prefix(tick + 1);
    if (!body.empty() && body.front() == 's') body.remove_prefix(1);
    if (body.empty()) throw Error(Errc::malformed, fmt::format("malformed literal '{}'", original));
    switch (body.front()) {
      case 'b': radix = 2; break;
      case 'o': radix = 8; break;
      case 'd': radix = 10; break;
      case 'h': radix = 16; break;
      default: throw Error(Errc::malformed, fmt::format("unknown radix in '{}'", original));
    }
    body.remove_prefix(1);
  } else if (body.size() > 2 && body[0] == '0' && (body[1] == 'b' || body[1] == 'x' || body[1] == 'd')) {
    radix = body[1] == 'b' ? 2 : body[1] == 'x' ? 16 : 10;
    body.remove_prefix(2);
  }

  bool any_digit = false;
  bool unknown = false;
  std::uint64_t value = 0;
  bool overflow = false;
  for (char c : body) {
    if (c == '_') continue;
    if (c == 'x' || c == 'z' || c == '?') {
      unknown = true;
      any_digit = true;
      continue;
    }
    auto d = digit_value(c);
    if (!d || *d >= radix)
      throw Error(Errc::malformed, fmt::format("malformed bit-vector text '{}'", original));
    any_digit = true;
    if (value > (~std::uint64_t{0} - *d) / radix) overflow = true;
    value = value * radix + *d;
  }
  if (!any_digit) throw Error(Errc::malformed, fmt::format("malformed bit-vector text '{}'", original));
  if (unknown) return BitVec::unknown(width);
  if (overflow || value > BitVec::mask(width))
    throw Error(Errc::overflow, fmt::format("'{}' does not fit in {} bits", original, width));
  return BitVec(width, value);
}

BitVec parse_hex_bitvec(std::string_view text, unsigned width) {
  auto b = text.find_first_not_of(" \t\r\n");
  auto e = text.find_last_not_of(" \t\r\n");
  const auto body = b == std::string_view::npos ? std::string_view{} : text.substr(b, e - b + 1);
  if (body.empty() || body.find('\'') != std::string_view::npos)
    throw Error(Errc::malformed, fmt::format("malformed hex text '{}'", text));
  return parse_bitvec(fmt::format("'h{}", body), width);
}

std::string format_bitvec(const BitVec& v) {
  if (v.is_unknown()) return "x";
  const unsigned digits = (v.width() + 3) / 4;
  return fmt::format("{:0{}x}", v.value(), digits);
}

std::string verilog_literal(const BitVec& v) {
  return fmt::format("{}'h{}", v.width(), format_bitvec(v));
}

}  // namespace autoverifix
