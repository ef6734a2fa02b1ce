#pragma once

// The conjunctive "select * where ..." query subset used by data nodes:
// comparisons with =, >= and <= joined by AND, optionally parenthesized.

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace xsams::query {

enum class Operator { Eq, Ge, Le };

std::string_view to_string(Operator op);

struct Text {
  std::string value;
  friend bool operator==(const Text&, const Text&) = default;
};

// Numeric literal; the spelling is kept so "2.6006E7" renders unchanged.
struct Number {
  std::string literal;
  double value = 0.0;
  friend bool operator==(const Number& a, const Number& b) { return a.literal == b.literal; }
};

using Literal = std::variant<Text, Number>;

struct Comparison {
  std::string keyword;
  Operator op = Operator::Eq;
  Literal value;
  friend bool operator==(const Comparison&, const Comparison&) = default;
};

struct QueryAst {
  std::vector<Comparison> constraints;  // conjunction, never empty
  friend bool operator==(const QueryAst&, const QueryAst&) = default;
};

// Throws Error(QuerySyntax) with the byte offset as subject.
QueryAst parse_query(std::string_view text);

// "select * where ((k = 'v')) AND ((n >= 1.5))"
std::string render(const QueryAst& ast);

using Record = std::map<std::string, std::string>;

// True iff every comparison holds. A keyword absent from the record fails
// its comparison. Text equality ignores case. Throws Error(TypeMismatch) when
// an ordering operator meets text on either side.
bool evaluate(const QueryAst& ast, const Record& record);

}  // namespace xsams::query
