#pragma once

#include <nlohmann/json.hpp>

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sot {

/// Exact rational in lowest terms, denominator > 0.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t numerator, std::int64_t denominator = 1);

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }
  long double to_long_double() const { return static_cast<long double>(num_) / static_cast<long double>(den_); }

  /// "13/4", "-5", "0".
  std::string str() const;

  bool operator==(const Rational&) const = default;
  std::strong_ordering operator<=>(const Rational& other) const;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

enum class TaskKind { Numeric, MultipleChoice, FreeText };

std::string_view to_string(TaskKind kind);
TaskKind task_kind_from_string(std::string_view name);

struct Choice {
  char label = 'A';
  std::string text;
};

/// Normalized comparable answer. Exactly one payload is meaningful, selected
/// by `kind`.
struct CanonicalAnswer {
  enum class Kind { Number, Choice, Text };

  Kind kind = Kind::Text;
  Rational number;
  char label = 0;
  std::string text;
  /// Parsed from a decimal literal with >= 6 fractional digits; grading
  /// then tolerates 1e-6. Not part of equality.
  bool long_decimal = false;

  static CanonicalAnswer of_number(Rational value, bool long_decimal = false);
  static CanonicalAnswer of_choice(char label);
  static CanonicalAnswer of_text(std::string normalized);

  /// Payload rendered as text: "13/4", "B", "some text".
  std::string render() const;

  bool operator==(const CanonicalAnswer& other) const;
  /// Kind first, then numeric / alphabetical / lexicographic payload order.
  std::strong_ordering operator<=>(const CanonicalAnswer& other) const;
};

nlohmann::json to_json(const CanonicalAnswer& answer);
CanonicalAnswer answer_from_json(const nlohmann::json& j);

/// One benchmark item.
struct Problem {
  std::string id;
  std::string question;
  TaskKind kind = TaskKind::Numeric;
  std::vector<Choice> choices;
  CanonicalAnswer gold;
  std::map<std::string, std::string> meta;

  std::vector<char> labels() const;
};

}  // namespace sot
