#include "atomip/parser.hpp"

#include <cctype>
#include <limits>
#include <optional>
#include <sstream>
#include <unordered_set>
#include <vector>

namespace atomip {

ParseError::ParseError(const std::string& message, SourceSpan span)
    : std::runtime_error(std::to_string(span.line) + ":" + std::to_string(span.column) + ": " +
                         message),
      span_(span),
      detail_(message) {}

namespace {

enum class Tok { Ident, Int, Star, Slash, Caret, Plus, Minus, Colon, Range, Le, Ge, End };

struct Token {
  Tok kind;
  std::string_view text;
  std::size_t column;  // 1-based
};

// Lexes one line (comment already stripped).
std::vector<Token> lex_line(std::string_view line, std::size_t line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char ch = line[i];
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    auto push = [&](Tok k, std::size_t len) {
      out.push_back({k, line.substr(start, len), start + 1});
      i = start + len;
    };
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i + 1;
      while (j < line.size() &&
             (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_'))
        ++j;
      push(Tok::Ident, j - i);
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i + 1;
      while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
      push(Tok::Int, j - i);
    } else if (ch == '*') {
      push(Tok::Star, 1);
    } else if (ch == '/') {
      push(Tok::Slash, 1);
    } else if (ch == '^') {
      push(Tok::Caret, 1);
    } else if (ch == '+') {
      push(Tok::Plus, 1);
    } else if (ch == '-') {
      push(Tok::Minus, 1);
    } else if (ch == ':') {
      push(Tok::Colon, 1);
    } else if (ch == '.' && i + 1 < line.size() && line[i + 1] == '.') {
      push(Tok::Range, 2);
    } else if (ch == '<' && i + 1 < line.size() && line[i + 1] == '=') {
      push(Tok::Le, 2);
    } else if (ch == '>' && i + 1 < line.size() && line[i + 1] == '=') {
      push(Tok::Ge, 2);
    } else {
      throw ParseError(std::string("unexpected character '") + ch + "'", {line_no, start + 1, 1});
    }
  }
  out.push_back({Tok::End, line.substr(line.size()), line.size() + 1});
  return out;
}

class LineParser {
 public:
  LineParser(std::vector<Token> tokens, std::size_t line_no, std::size_t line_len,
             const std::vector<Variable>& vars)
      : toks_(std::move(tokens)), line_(line_no), line_len_(line_len), vars_(vars) {}

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool at(Tok k) const { return peek().kind == k; }

  [[noreturn]] void fail(const std::string& msg, const Token& t) const {
    // End-of-line errors point at the last character so the span stays inside the text.
    std::size_t col = t.column;
    std::size_t len = t.text.size();
    if (t.kind == Tok::End) {
      col = line_len_ == 0 ? 1 : line_len_;
      len = 0;
    }
    throw ParseError(msg, {line_, col, len});
  }

  const Token& expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what, peek());
    return next();
  }

  void expect_keyword(std::string_view kw) {
    if (!at(Tok::Ident) || peek().text != kw)
      fail("expected '" + std::string(kw) + "'", peek());
    next();
  }

  void expect_end() {
    if (!at(Tok::End)) fail("unexpected trailing input", peek());
  }

  mpz_class integer_literal(const Token& t) {
    mpz_class z;
    if (z.set_str(std::string(t.text), 10) != 0) fail("malformed integer", t);
    return z;
  }

  Value signed_int(const char* what) {
    bool neg = false;
    if (at(Tok::Minus)) {
      next();
      neg = true;
    } else if (at(Tok::Plus)) {
      next();
    }
    const Token& t = expect(Tok::Int, what);
    mpz_class z = integer_literal(t);
    if (neg) z = -z;
    if (!z.fits_slong_p()) fail("integer out of range", t);
    return static_cast<Value>(z.get_si());
  }

  // number ['/' number]
  Rational rational_literal() {
    const Token& t = expect(Tok::Int, "number");
    Rational r(integer_literal(t));
    if (at(Tok::Slash)) {
      next();
      const Token& d = expect(Tok::Int, "denominator");
      mpz_class den = integer_literal(d);
      if (den == 0) fail("zero denominator", d);
      r /= Rational(den);
    }
    return r;
  }

  Rational signed_rational() {
    bool neg = false;
    if (at(Tok::Minus)) {
      next();
      neg = true;
    } else if (at(Tok::Plus)) {
      next();
    }
    Rational r = rational_literal();
    return neg ? Rational(-r) : r;
  }

  // factor := rational | ident ['^' int]
  void factor(Monomial& m) {
    if (at(Tok::Int)) {
      m.coefficient *= rational_literal();
      return;
    }
    const Token& t = expect(Tok::Ident, "number or variable");
    std::optional<std::size_t> index;
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i].name == t.text) index = i;
    if (!index) fail("undeclared variable '" + std::string(t.text) + "'", t);
    std::size_t power = 1;
    if (at(Tok::Caret)) {
      next();
      const Token& p = expect(Tok::Int, "exponent");
      mpz_class z = integer_literal(p);
      if (z > 64) fail("exponent too large", p);
      power = z.get_ui();
    }
    for (std::size_t k = 0; k < power; ++k) m.factors.push_back(*index);
  }

  // poly := ['+'|'-'] term (('+'|'-') term)*
  Polynomial polynomial() {
    std::vector<Monomial> terms;
    bool first = true;
    while (true) {
      Rational sign = 1;
      if (at(Tok::Plus) || at(Tok::Minus)) {
        if (next().kind == Tok::Minus) sign = -1;
      } else if (!first) {
        break;
      }
      Monomial m{sign, {}};
      factor(m);
      while (at(Tok::Star)) {
        next();
        factor(m);
      }
      terms.push_back(std::move(m));
      first = false;
    }
    return Polynomial(std::move(terms));
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t line_len_;
  const std::vector<Variable>& vars_;
};

}  // namespace

Problem parse_problem(std::string_view text) {
  std::vector<Variable> vars;
  std::optional<Polynomial> cost;
  std::vector<Constraint> constraints;
  std::unordered_set<std::string> constraint_names;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::size_t last_line_len = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    ++line_no;
    last_line_len = line.size();
    pos = eol + 1;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    LineParser lp(lex_line(line, line_no), line_no, line.size(), vars);
    if (lp.at(Tok::End)) {
      if (eol == text.size()) break;
      continue;
    }

    const Token head = lp.peek();
    if (head.kind != Tok::Ident) lp.fail("expected 'var', 'maximize' or 'subject'", head);

    if (head.text == "var") {
      lp.next();
      const Token name = lp.expect(Tok::Ident, "variable name");
      for (const auto& v : vars)
        if (v.name == name.text) lp.fail("duplicate variable '" + std::string(name.text) + "'", name);
      lp.expect_keyword("in");
      const Value lo = lp.signed_int("lower bound");
      lp.expect(Tok::Range, "'..'");
      const Token hi_tok = lp.peek();
      const Value hi = lp.signed_int("upper bound");
      if (lo > hi) lp.fail("empty domain", hi_tok);
      lp.expect_end();
      vars.push_back({std::string(name.text), lo, hi});
    } else if (head.text == "maximize") {
      if (cost) lp.fail("duplicate 'maximize' statement", head);
      lp.next();
      Polynomial poly = lp.polynomial();
      if (poly.empty()) lp.fail("empty cost", head);
      lp.expect_end();
      cost = std::move(poly);
    } else if (head.text == "subject") {
      lp.next();
      const Token name = lp.expect(Tok::Ident, "constraint name");
      if (!constraint_names.insert(std::string(name.text)).second)
        lp.fail("duplicate constraint '" + std::string(name.text) + "'", name);
      lp.expect(Tok::Colon, "':'");
      const Token poly_start = lp.peek();
      Polynomial lhs = lp.polynomial();
      Sense sense;
      if (lp.at(Tok::Le)) {
        sense = Sense::LessEqual;
      } else if (lp.at(Tok::Ge)) {
        sense = Sense::GreaterEqual;
      } else {
        lp.fail("expected '<=' or '>='", lp.peek());
      }
      lp.next();
      Rational rhs = lp.signed_rational();
      lp.expect_end();
      const Rational k = lhs.constant();
      if (k != 0) {
        lhs = lhs + Polynomial({Monomial{-k, {}}});
        rhs -= k;
      }
      if (lhs.empty()) lp.fail("constraint has no variable terms", poly_start);
      constraints.push_back({std::string(name.text), std::move(lhs), sense, rhs});
    } else {
      lp.fail("unknown statement '" + std::string(head.text) + "'", head);
    }
    if (eol == text.size()) break;
  }

  if (!cost) {
    throw ParseError("missing 'maximize' statement",
                     {line_no == 0 ? 1 : line_no, 1, last_line_len == 0 ? std::size_t{0} : std::size_t{1}});
  }
  return Problem(std::move(vars), std::move(*cost), std::move(constraints));
}

namespace {

std::string format_monomial_body(const Monomial& m, const std::vector<Variable>& vars) {
  std::string out;
  for (std::size_t i = 0; i < m.factors.size();) {
    std::size_t j = i;
    while (j < m.factors.size() && m.factors[j] == m.factors[i]) ++j;
    if (!out.empty()) out += '*';
    out += vars.at(m.factors[i]).name;
    if (j - i > 1) out += "^" + std::to_string(j - i);
    i = j;
  }
  return out;
}

}  // namespace

std::string format_polynomial(const Polynomial& poly, const std::vector<Variable>& vars) {
  if (poly.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : poly.terms()) {
    const bool negative = t.coefficient < 0;
    const Rational mag = abs(t.coefficient);
    if (first) {
      if (negative) out += '-';
    } else {
      out += negative ? " - " : " + ";
    }
    const std::string body = format_monomial_body(t, vars);
    if (body.empty()) {
      out += to_string(mag);
    } else if (mag == 1) {
      out += body;
    } else {
      out += to_string(mag) + "*" + body;
    }
    first = false;
  }
  return out;
}

std::string format_problem(const Problem& p) {
  std::ostringstream os;
  for (const auto& v : p.variables()) os << "var " << v.name << " in " << v.lo << ".." << v.hi << '\n';
  os << "maximize " << format_polynomial(p.cost(), p.variables()) << '\n';
  for (const auto& c : p.constraints()) {
    os << "subject " << c.name << ": " << format_polynomial(c.lhs, p.variables())
       << (c.sense == Sense::LessEqual ? " <= " : " >= ") << to_string(c.rhs) << '\n';
  }
  return os.str();
}

}  // namespace atomip
