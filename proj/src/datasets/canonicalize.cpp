#include "sot/datasets/canonicalize.hpp"

#include "sot/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace sot::datasets {
namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string replace_unicode_minus(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.substr(i, 3) == "\xE2\x88\x92") {
      out += '-';
      i += 2;
    } else {
      out += text[i];
    }
  }
  return out;
}

bool accumulate(std::int64_t& acc, char digit) {
  return !__builtin_mul_overflow(acc, 10, &acc) && !__builtin_add_overflow(acc, digit - '0', &acc);
}

}  // namespace

std::vector<NumberToken> scan_numbers(std::string_view input) {
  const std::string text = replace_unicode_minus(input);
  const std::size_t n = text.size();
  std::vector<NumberToken> out;
  std::size_t i = 0;
  while (i < n) {
    const std::size_t start = i;
    bool negative = false;
    std::size_t p = i;
    if ((text[p] == '-' || text[p] == '+') && (p == 0 || !is_alnum(text[p - 1]))) {
      negative = text[p] == '-';
      ++p;
    }
    const bool leading_point = p + 1 < n && text[p] == '.' && is_digit(text[p + 1]) && (p == 0 || !is_digit(text[p - 1]));
    if (p >= n || !(is_digit(text[p]) || leading_point)) {
      ++i;
      continue;
    }

    std::int64_t whole = 0;
    bool overflow = false;
    std::size_t run = 0;
    while (p < n && is_digit(text[p])) {
      overflow |= !accumulate(whole, text[p]);
      ++p;
      ++run;
    }
    // Thousands grouping: 1-3 leading digits then ",ddd" groups.
    if (run >= 1 && run <= 3) {
      while (p + 3 < n && text[p] == ',' && is_digit(text[p + 1]) && is_digit(text[p + 2]) &&
             is_digit(text[p + 3]) && (p + 4 >= n || !is_digit(text[p + 4]))) {
        for (std::size_t k = 1; k <= 3; ++k) overflow |= !accumulate(whole, text[p + k]);
        p += 4;
      }
    }

    std::int64_t numerator = whole;
    std::int64_t denominator = 1;
    bool long_decimal = false;
    if (p + 1 < n && text[p] == '.' && is_digit(text[p + 1])) {
      ++p;
      int digits = 0;
      while (p < n && is_digit(text[p])) {
        overflow |= !accumulate(numerator, text[p]);
        overflow |= __builtin_mul_overflow(denominator, 10, &denominator);
        ++digits;
        ++p;
      }
      long_decimal = digits >= 6;
    } else if (p + 1 < n && text[p] == '/' && is_digit(text[p + 1])) {
      std::size_t q = p + 1;
      std::int64_t den = 0;
      bool den_overflow = false;
      while (q < n && is_digit(text[q])) {
        den_overflow |= !accumulate(den, text[q]);
        ++q;
      }
      if (!den_overflow && den != 0) {
        denominator = den;
        p = q;
      }
    }

    if (!overflow) {
      out.push_back({start, p, Rational(negative ? -numerator : numerator, denominator), long_decimal});
    }
    i = p;
  }
  return out;
}

std::optional<char> find_choice_label(std::string_view text, std::span<const char> labels, bool from_end,
                                      LowercaseLabels lowercase) {
  auto is_label = [&](char upper) { return std::find(labels.begin(), labels.end(), upper) != labels.end(); };
  auto standalone = [&](std::size_t i) {
    return (i == 0 || !is_alnum(text[i - 1])) && (i + 1 >= text.size() || !is_alnum(text[i + 1]));
  };
  auto scan = [&](auto&& accept) -> std::optional<char> {
    const std::size_t n = text.size();
    for (std::size_t step = 0; step < n; ++step) {
      const std::size_t i = from_end ? n - 1 - step : step;
      if (accept(i)) return static_cast<char>(std::toupper(static_cast<unsigned char>(text[i])));
    }
    return std::nullopt;
  };

  if (auto upper = scan([&](std::size_t i) {
        return std::isupper(static_cast<unsigned char>(text[i])) && is_label(text[i]) && standalone(i);
      })) {
    return upper;
  }
  if (lowercase == LowercaseLabels::Reject) return std::nullopt;
  return scan([&](std::size_t i) {
    const char c = text[i];
    if (!std::islower(static_cast<unsigned char>(c))) return false;
    if (!is_label(static_cast<char>(std::toupper(static_cast<unsigned char>(c)))) || !standalone(i)) return false;
    if (lowercase == LowercaseLabels::Parenthesized) {
      return i > 0 && text[i - 1] == '(' && i + 1 < text.size() && text[i + 1] == ')';
    }
    return true;
  });
}

std::string normalize_text(std::string_view raw) {
  std::string out;
  bool pending_space = false;
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

CanonicalAnswer canonicalize(std::string_view raw, TaskKind kind, std::span<const char> labels) {
  switch (kind) {
    case TaskKind::Numeric: {
      auto tokens = scan_numbers(raw);
      if (tokens.empty()) throw Error(ErrorCode::NotCanonicalizable, "no number in '" + std::string(raw) + "'");
      return CanonicalAnswer::of_number(tokens.front().value, tokens.front().long_decimal);
    }
    case TaskKind::MultipleChoice: {
      auto label = find_choice_label(raw, labels, false, LowercaseLabels::Standalone);
      if (!label) throw Error(ErrorCode::NotCanonicalizable, "no choice label in '" + std::string(raw) + "'");
      return CanonicalAnswer::of_choice(*label);
    }
    case TaskKind::FreeText: {
      auto text = normalize_text(raw);
      if (text.empty()) throw Error(ErrorCode::NotCanonicalizable, "blank text answer");
      return CanonicalAnswer::of_text(std::move(text));
    }
  }
  throw Error(ErrorCode::NotCanonicalizable, "unknown task kind");
}

bool grade(const CanonicalAnswer& pred, const CanonicalAnswer& gold) {
  if (pred.kind != gold.kind) return false;
  switch (pred.kind) {
    case CanonicalAnswer::Kind::Number:
      if (pred.long_decimal || gold.long_decimal) {
        return std::fabs(pred.number.to_long_double() - gold.number.to_long_double()) <= 1e-6L;
      }
      return pred.number == gold.number;
    case CanonicalAnswer::Kind::Choice: return pred.label == gold.label;
    case CanonicalAnswer::Kind::Text: return pred.text == gold.text;
  }
  return false;
}

}  // namespace sot::datasets
