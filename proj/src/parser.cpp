#include "reactsynth/parser.hpp"

#include "reactsynth/error.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <vector>

namespace reactsynth {

namespace {

enum class Tok {
  Number, Ident, Var, LParen, RParen, LBracket, RBracket, Comma,
  Not, And, Or, Implies, Plus, Minus, Star, Gt, Ge, Lt, Le, End
};

struct Token
{
  Tok kind;
  std::string text;
  double number = 0;
  int var = -1;
  std::size_t line = 1;
  std::size_t column = 1;
};

std::vector<Token> tokenize(std::string_view s)
{
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token t{Tok::End, {}, 0, -1, line, col};
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < s.size() &&
                                                        std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      double v = 0;
      auto res = std::from_chars(s.data() + i, s.data() + s.size(), v);
      if (res.ec != std::errc()) { throw ParseError("malformed number", line, col); }
      const auto n = static_cast<std::size_t>(res.ptr - (s.data() + i));
      t.kind = Tok::Number;
      t.number = v;
      t.text = std::string(s.substr(i, n));
      out.push_back(t);
      advance(n);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) { ++j; }
      t.text = std::string(s.substr(i, j - i));
      t.kind = Tok::Ident;
      if (t.text.size() > 1 && t.text[0] == 'x' &&
          t.text.find_first_not_of("0123456789", 1) == std::string::npos) {
        t.kind = Tok::Var;
        t.var = std::stoi(t.text.substr(1));
      }
      out.push_back(t);
      advance(j - i);
      continue;
    }
    auto two = s.substr(i, 2);
    if (two == "->") {
      t.kind = Tok::Implies;
    } else if (two == ">=") {
      t.kind = Tok::Ge;
    } else if (two == "<=") {
      t.kind = Tok::Le;
    }
    if (t.kind != Tok::End) {
      t.text = std::string(two);
      out.push_back(t);
      advance(2);
      continue;
    }
    switch (c) {
    case '(': t.kind = Tok::LParen; break;
    case ')': t.kind = Tok::RParen; break;
    case '[': t.kind = Tok::LBracket; break;
    case ']': t.kind = Tok::RBracket; break;
    case ',': t.kind = Tok::Comma; break;
    case '!': t.kind = Tok::Not; break;
    case '&': t.kind = Tok::And; break;
    case '|': t.kind = Tok::Or; break;
    case '+': t.kind = Tok::Plus; break;
    case '-': t.kind = Tok::Minus; break;
    case '*': t.kind = Tok::Star; break;
    case '>': t.kind = Tok::Gt; break;
    case '<': t.kind = Tok::Lt; break;
    default: throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    t.text = std::string(1, c);
    out.push_back(t);
    advance(1);
  }
  out.push_back(Token{Tok::End, "end of input", 0, -1, line, col});
  return out;
}

// Affine expression sum_i coeff_i * x_i + constant.
struct Affine
{
  std::vector<double> coeff;
  double constant = 0;

  void add_var(int v, double a)
  {
    if (static_cast<std::size_t>(v) >= coeff.size()) { coeff.resize(static_cast<std::size_t>(v) + 1, 0.0); }
    coeff[static_cast<std::size_t>(v)] += a;
  }
};

class Parser
{
public:
  Parser(std::vector<Token> toks, const Definitions & defs) : toks_(std::move(toks)), defs_(defs) {}

  Formula parse()
  {
    Formula f = implication();
    expect(Tok::End, "end of input");
    return f;
  }

private:
  const Token & peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token & take() { return toks_[pos_++]; }
  bool accept(Tok k)
  {
    if (peek().kind == k) {
      ++pos_;
      return true;
    }
    return false;
  }
  const Token & expect(Tok k, const char * what)
  {
    if (peek().kind != k) { fail(std::string("expected ") + what + ", found '" + peek().text + "'"); }
    return take();
  }
  [[noreturn]] void fail(const std::string & msg) const { throw ParseError(msg, peek().line, peek().column); }

  Formula implication()
  {
    Formula lhs = disjunction();
    if (accept(Tok::Implies)) { return Formula::implication(lhs, implication()); }
    return lhs;
  }

  Formula disjunction()
  {
    Formula f = conjunction();
    while (accept(Tok::Or)) { f = Formula::disjunction(f, conjunction()); }
    return f;
  }

  Formula conjunction()
  {
    Formula f = unary();
    while (accept(Tok::And)) { f = Formula::conjunction(f, unary()); }
    return f;
  }

  int integer()
  {
    const Token & t = expect(Tok::Number, "integer");
    if (t.number < 0 || t.number != static_cast<double>(static_cast<int>(t.number))) {
      throw ParseError("expected non-negative integer, found '" + t.text + "'", t.line, t.column);
    }
    return static_cast<int>(t.number);
  }

  bool is_keyword(const char * kw) const { return peek().kind == Tok::Ident && peek().text == kw; }

  Formula unary()
  {
    if (accept(Tok::Not)) { return Formula::negation(unary()); }
    if (is_keyword("X")) {
      take();
      int steps = 1;
      if (accept(Tok::LBracket)) {
        steps = integer();
        expect(Tok::RBracket, "']'");
      }
      return Formula::next(steps, unary());
    }
    if (is_keyword("F") || is_keyword("G")) {
      const Token op = take();
      expect(Tok::LBracket, "'['");
      const int a = integer();
      expect(Tok::Comma, "','");
      const int b = integer();
      expect(Tok::RBracket, "']'");
      if (a > b) {
        throw ParseError("empty interval [" + std::to_string(a) + "," + std::to_string(b) + "]", op.line,
                         op.column);
      }
      Formula body = unary();
      return op.text == "F" ? Formula::eventually(a, b, body) : Formula::always(a, b, body);
    }
    return primary();
  }

  Formula primary()
  {
    if (accept(Tok::LParen)) {
      Formula f = implication();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (is_keyword("true")) {
      take();
      return Formula::truth();
    }
    if (is_keyword("false")) {
      take();
      return Formula::falsity();
    }
    if (peek().kind == Tok::Ident) {
      const Token & t = take();
      auto it = defs_.find(t.text);
      if (it == defs_.end()) { throw ParseError("unknown identifier '" + t.text + "'", t.line, t.column); }
      return it->second;
    }
    return comparison();
  }

  Formula comparison()
  {
    Affine lhs = affine();
    const Token & op = take();
    if (op.kind != Tok::Gt && op.kind != Tok::Ge && op.kind != Tok::Lt && op.kind != Tok::Le) {
      throw ParseError("expected comparison operator, found '" + op.text + "'", op.line, op.column);
    }
    Affine rhs = affine();
    // diff = lhs - rhs; `diff > 0` for > and >=, `-diff > 0` for < and <=.
    for (std::size_t i = 0; i < rhs.coeff.size(); ++i) { lhs.add_var(static_cast<int>(i), -rhs.coeff[i]); }
    lhs.constant -= rhs.constant;
    const double sign = (op.kind == Tok::Gt || op.kind == Tok::Ge) ? 1.0 : -1.0;
    Eigen::VectorXd d(static_cast<Eigen::Index>(lhs.coeff.size()));
    for (std::size_t i = 0; i < lhs.coeff.size(); ++i) {
      d(static_cast<Eigen::Index>(i)) = sign * lhs.coeff[i] + 0.0;
    }
    return Formula::predicate(d, -sign * lhs.constant + 0.0);
  }

  Affine affine()
  {
    Affine e;
    double sign = 1.0;
    if (accept(Tok::Minus)) {
      sign = -1.0;
    } else {
      accept(Tok::Plus);
    }
    term(e, sign);
    while (true) {
      if (accept(Tok::Plus)) {
        term(e, 1.0);
      } else if (accept(Tok::Minus)) {
        term(e, -1.0);
      } else {
        break;
      }
    }
    return e;
  }

  void term(Affine & e, double sign)
  {
    if (peek().kind == Tok::Var) {
      e.add_var(take().var, sign);
      return;
    }
    if (peek().kind == Tok::Number) {
      const double c = take().number;
      if (accept(Tok::Star)) {
        e.add_var(expect(Tok::Var, "state variable").var, sign * c);
      } else if (peek().kind == Tok::Var) {
        e.add_var(take().var, sign * c);
      } else {
        e.constant += sign * c;
      }
      return;
    }
    fail("expected number or state variable, found '" + peek().text + "'");
  }

  std::vector<Token> toks_;
  const Definitions & defs_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_formula(std::string_view text, const Definitions & defs)
{
  return Parser(tokenize(text), defs).parse();
}

}  // namespace reactsynth
