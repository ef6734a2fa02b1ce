#include "xsams/query.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <optional>

#include "xsams/error.hpp"

namespace xsams::query {

std::string_view to_string(Operator op) {
  switch (op) {
    case Operator::Eq: return "=";
    case Operator::Ge: return ">=";
    case Operator::Le: return "<=";
  }
  return "=";
}

namespace {

std::optional<double> to_number(std::string_view s) {
  std::string buf(s);
  if (buf.empty()) return std::nullopt;
  char* end = nullptr;
  double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) return std::nullopt;
  return v;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

bool is_keyword_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

class Parser {
 public:
  explicit Parser(std::string_view in) : in_(in) {}

  QueryAst run() {
    expect_word("select");
    skip_space();
    if (peek() != '*') fail("'*'");
    ++pos_;
    expect_word("where");
    QueryAst ast;
    conjunction(ast, 0);
    skip_space();
    if (pos_ != in_.size()) fail("AND or end of query");
    return ast;
  }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;

  char peek() const { return pos_ < in_.size() ? in_[pos_] : '\0'; }

  [[noreturn]] void fail(std::string_view expected) const {
    std::string found = pos_ < in_.size() ? "'" + std::string(1, in_[pos_]) + "'"
                                          : std::string("end of query");
    throw Error(ErrorCode::QuerySyntax, std::to_string(pos_),
                "expected " + std::string(expected) + ", found " + found);
  }

  void skip_space() {
    while (pos_ < in_.size() && std::isspace(static_cast<unsigned char>(in_[pos_]))) ++pos_;
  }

  std::string_view word() {
    skip_space();
    auto start = pos_;
    while (pos_ < in_.size() && is_keyword_char(in_[pos_])) ++pos_;
    return in_.substr(start, pos_ - start);
  }

  void expect_word(std::string_view w) {
    auto save = pos_;
    if (!iequals(word(), w)) {
      pos_ = save;
      skip_space();
      fail("'" + std::string(w) + "'");
    }
  }

  bool accept_and() {
    auto save = pos_;
    if (iequals(word(), "AND")) return true;
    pos_ = save;
    return false;
  }

  void conjunction(QueryAst& ast, int depth) {
    term(ast, depth);
    while (accept_and()) term(ast, depth);
  }

  void term(QueryAst& ast, int depth) {
    if (depth > 64) fail("shallower nesting");
    skip_space();
    if (peek() == '(') {
      ++pos_;
      conjunction(ast, depth + 1);
      skip_space();
      if (peek() != ')') fail("')'");
      ++pos_;
      return;
    }
    ast.constraints.push_back(comparison());
  }

  Comparison comparison() {
    Comparison c;
    auto kw = word();
    if (kw.empty() || kw.front() == '.' || kw.back() == '.' ||
        kw.find("..") != std::string_view::npos) {
      fail("a restrictable keyword");
    }
    c.keyword = std::string(kw);
    skip_space();
    if (in_.substr(pos_, 2) == ">=") {
      c.op = Operator::Ge;
      pos_ += 2;
    } else if (in_.substr(pos_, 2) == "<=") {
      c.op = Operator::Le;
      pos_ += 2;
    } else if (peek() == '=') {
      c.op = Operator::Eq;
      ++pos_;
    } else {
      fail("'=', '>=' or '<='");
    }
    c.value = literal();
    return c;
  }

  Literal literal() {
    skip_space();
    if (peek() == '\'') {
      ++pos_;
      std::string value;
      for (;;) {
        if (pos_ >= in_.size()) fail("closing quote");
        char ch = in_[pos_++];
        if (ch == '\'') {
          if (peek() == '\'') {  // '' escapes a quote
            value += '\'';
            ++pos_;
            continue;
          }
          break;
        }
        value += ch;
      }
      return Text{value};
    }
    auto start = pos_;
    while (pos_ < in_.size() &&
           (std::isalnum(static_cast<unsigned char>(in_[pos_])) || in_[pos_] == '.' ||
            in_[pos_] == '+' || in_[pos_] == '-')) {
      ++pos_;
    }
    auto lit = in_.substr(start, pos_ - start);
    auto v = to_number(lit);
    if (!v) {
      pos_ = start;
      fail("a quoted string or a number");
    }
    return Number{std::string(lit), *v};
  }
};

std::string render_literal(const Literal& lit) {
  if (const auto* n = std::get_if<Number>(&lit)) return n->literal;
  std::string out = "'";
  for (char c : std::get<Text>(lit).value) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

const std::string* lookup(const Record& record, const std::string& keyword) {
  if (auto it = record.find(keyword); it != record.end()) return &it->second;
  for (const auto& [k, v] : record) {
    if (iequals(k, keyword)) return &v;
  }
  return nullptr;
}

bool holds(const Comparison& c, const std::string& actual) {
  if (const auto* text = std::get_if<Text>(&c.value)) {
    if (c.op != Operator::Eq) {
      throw Error(ErrorCode::TypeMismatch, c.keyword,
                  "ordering comparison against text literal");
    }
    return iequals(actual, text->value);
  }
  const auto& number = std::get<Number>(c.value);
  auto value = to_number(actual);
  if (!value) {
    if (c.op == Operator::Eq) return false;
    throw Error(ErrorCode::TypeMismatch, c.keyword,
                "ordering comparison against non-numeric value '" + actual + "'");
  }
  switch (c.op) {
    case Operator::Eq: return *value == number.value;
    case Operator::Ge: return *value >= number.value;
    case Operator::Le: return *value <= number.value;
  }
  return false;
}

}  // namespace

QueryAst parse_query(std::string_view text) { return Parser(text).run(); }

std::string render(const QueryAst& ast) {
  std::string out = "select * where ";
  for (std::size_t i = 0; i < ast.constraints.size(); ++i) {
    const auto& c = ast.constraints[i];
    if (i) out += " AND ";
    out += "((";
    out += c.keyword;
    out += ' ';
    out += to_string(c.op);
    out += ' ';
    out += render_literal(c.value);
    out += "))";
  }
  return out;
}

bool evaluate(const QueryAst& ast, const Record& record) {
  for (const auto& c : ast.constraints) {
    const auto* actual = lookup(record, c.keyword);
    if (!actual || !holds(c, *actual)) return false;
  }
  return true;
}

}  // namespace xsams::query
