#include "sot/answer.hpp"

#include "sot/error.hpp"

#include <numeric>

namespace sot {

Rational::Rational(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
  if (denominator < 0) {
    numerator = -numerator;
    denominator = -denominator;
  }
  const auto g = std::gcd(numerator, denominator);
  num_ = numerator / g;
  den_ = denominator / g;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::strong_ordering Rational::operator<=>(const Rational& other) const {
  const __int128 lhs = static_cast<__int128>(num_) * other.den_;
  const __int128 rhs = static_cast<__int128>(other.num_) * den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::Numeric: return "numeric";
    case TaskKind::MultipleChoice: return "multiple_choice";
    case TaskKind::FreeText: return "free_text";
  }
  return "numeric";
}

TaskKind task_kind_from_string(std::string_view name) {
  if (name == "numeric") return TaskKind::Numeric;
  if (name == "multiple_choice") return TaskKind::MultipleChoice;
  if (name == "free_text") return TaskKind::FreeText;
  throw Error(ErrorCode::InvalidArgument, "unknown task kind '" + std::string(name) + "'");
}

CanonicalAnswer CanonicalAnswer::of_number(Rational value, bool long_decimal) {
  CanonicalAnswer a;
  a.kind = Kind::Number;
  a.number = value;
  a.long_decimal = long_decimal;
  return a;
}

CanonicalAnswer CanonicalAnswer::of_choice(char label) {
  CanonicalAnswer a;
  a.kind = Kind::Choice;
  a.label = label;
  return a;
}

CanonicalAnswer CanonicalAnswer::of_text(std::string normalized) {
  CanonicalAnswer a;
  a.kind = Kind::Text;
  a.text = std::move(normalized);
  return a;
}

std::string CanonicalAnswer::render() const {
  switch (kind) {
    case Kind::Number: return number.str();
    case Kind::Choice: return std::string(1, label);
    case Kind::Text: return text;
  }
  return {};
}

bool CanonicalAnswer::operator==(const CanonicalAnswer& other) const {
  return (*this <=> other) == std::strong_ordering::equal;
}

std::strong_ordering CanonicalAnswer::operator<=>(const CanonicalAnswer& other) const {
  if (kind != other.kind) return static_cast<int>(kind) <=> static_cast<int>(other.kind);
  switch (kind) {
    case Kind::Number: return number <=> other.number;
    case Kind::Choice: return label <=> other.label;
    case Kind::Text: return text.compare(other.text) <=> 0;
  }
  return std::strong_ordering::equal;
}

namespace {
std::string_view kind_name(CanonicalAnswer::Kind kind) {
  switch (kind) {
    case CanonicalAnswer::Kind::Number: return "number";
    case CanonicalAnswer::Kind::Choice: return "choice";
    case CanonicalAnswer::Kind::Text: return "text";
  }
  return "text";
}
}  // namespace

nlohmann::json to_json(const CanonicalAnswer& answer) {
  return {{"kind", kind_name(answer.kind)}, {"value", answer.render()}};
}

CanonicalAnswer answer_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const auto value = j.at("value").get<std::string>();
  if (kind == "choice") {
    if (value.size() != 1) throw Error(ErrorCode::InvalidArgument, "choice answer must be one letter");
    return CanonicalAnswer::of_choice(value[0]);
  }
  if (kind == "text") return CanonicalAnswer::of_text(value);
  if (kind == "number") {
    const auto slash = value.find('/');
    if (slash == std::string::npos) return CanonicalAnswer::of_number(Rational(std::stoll(value)));
    return CanonicalAnswer::of_number(Rational(std::stoll(value.substr(0, slash)), std::stoll(value.substr(slash + 1))));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown answer kind '" + kind + "'");
}

std::vector<char> Problem::labels() const {
  std::vector<char> out;
  out.reserve(choices.size());
  for (const auto& c : choices) out.push_back(c.label);
  return out;
}

}  // namespace sot
