#pragma once

#include "sot/answer.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sot::datasets {

struct NumberToken {
  std::size_t begin = 0;
  std::size_t end = 0;
  Rational value;
  bool long_decimal = false;
};

/// Numeric literals in order of appearance: optional sign, digits with
/// optional thousands grouping, optional decimal part or "/denominator".
/// Literals that overflow 64-bit rationals are skipped.
std::vector<NumberToken> scan_numbers(std::string_view text);

enum class LowercaseLabels { Reject, Standalone, Parenthesized };

/// A single letter not adjacent to another letter or digit that is one of
/// `labels`. Uppercase occurrences win over lowercase ones.
std::optional<char> find_choice_label(std::string_view text, std::span<const char> labels, bool from_end,
                                      LowercaseLabels lowercase);

/// Lowercase, trim, collapse internal whitespace runs to one space.
std::string normalize_text(std::string_view raw);

/// Throws NotCanonicalizable.
CanonicalAnswer canonicalize(std::string_view raw, TaskKind kind, std::span<const char> labels = {});

/// Cross-kind comparisons are false. Numbers compare exactly unless either
/// side came from a long decimal literal, in which case |a - b| <= 1e-6.
bool grade(const CanonicalAnswer& pred, const CanonicalAnswer& gold);

}  // namespace sot::datasets
