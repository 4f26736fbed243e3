#include "expr/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <numbers>

namespace srmin::expr {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::size_t length = 0;
  double number = 0.0;
  std::string_view text;
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return cur_; }

  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
    cur_.offset = pos_;
    cur_.text = {};
    if (pos_ >= src_.size()) {
      cur_.kind = Tok::End;
      cur_.length = 0;
      return;
    }
    char c = src_[pos_];
    switch (c) {
      case '+': cur_.kind = Tok::Plus; break;
      case '-': cur_.kind = Tok::Minus; break;
      case '*': cur_.kind = Tok::Star; break;
      case '/': cur_.kind = Tok::Slash; break;
      case '^': cur_.kind = Tok::Caret; break;
      case '(': cur_.kind = Tok::LParen; break;
      case ')': cur_.kind = Tok::RParen; break;
      case ',': cur_.kind = Tok::Comma; break;
      default:
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
          lex_number();
          return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
          lex_ident();
          return;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }
    cur_.length = 1;
    ++pos_;
  }

  void lex_number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
        ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
          ++pos_;
      } else {
        pos_ = mark;  // bare 'e' after a number is not an exponent
      }
    }
    std::string text(src_.substr(start, pos_ - start));
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size())
      throw ParseError("malformed number '" + text + "'", start);
    cur_.kind = Tok::Number;
    cur_.length = pos_ - start;
    cur_.number = v;
  }

  void lex_ident() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    cur_.kind = Tok::Ident;
    cur_.length = pos_ - start;
    cur_.text = src_.substr(start, pos_ - start);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token cur_;
};

Op function_op(std::string_view name) {
  if (name == "sin") return Op::Sin;
  if (name == "cos") return Op::Cos;
  if (name == "tan") return Op::Tan;
  if (name == "exp") return Op::Exp;
  if (name == "log") return Op::Log;
  if (name == "sqrt") return Op::Sqrt;
  if (name == "atan") return Op::Atan;
  return Op::Constant;  // sentinel: not a function
}

class Parser {
public:
  Parser(std::string_view src, const Chart& chart) : lex_(src), chart_(chart) {}

  ExprPtr run() {
    ExprPtr e = parse_sum();
    const Token& t = lex_.peek();
    if (t.kind != Tok::End)
      throw ParseError("unexpected trailing input", t.offset);
    return e;
  }

private:
  ExprPtr parse_sum() {
    ExprPtr e = parse_product();
    for (;;) {
      Tok k = lex_.peek().kind;
      if (k != Tok::Plus && k != Tok::Minus) return e;
      lex_.take();
      ExprPtr rhs = parse_product();
      e = k == Tok::Plus ? add(std::move(e), std::move(rhs))
                         : sub(std::move(e), std::move(rhs));
    }
  }

  ExprPtr parse_product() {
    ExprPtr e = parse_unary();
    for (;;) {
      Tok k = lex_.peek().kind;
      if (k != Tok::Star && k != Tok::Slash) return e;
      lex_.take();
      ExprPtr rhs = parse_unary();
      e = k == Tok::Star ? mul(std::move(e), std::move(rhs))
                         : div(std::move(e), std::move(rhs));
    }
  }

  ExprPtr parse_unary() {
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      return neg(parse_unary());
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (lex_.peek().kind != Tok::Caret) return base;
    lex_.take();
    std::size_t exp_offset = lex_.peek().offset;
    ExprPtr exponent = parse_unary();  // right-binding: x^-2, x^2^3 = x^(2^3)
    if (!exponent->is_constant())
      throw ParseError("power exponent must be a constant expression", exp_offset);
    return binary(Op::Pow, std::move(base), std::move(exponent));
  }

  ExprPtr parse_primary() {
    Token t = lex_.take();
    switch (t.kind) {
      case Tok::Number:
        return constant(t.number);
      case Tok::LParen: {
        ExprPtr e = parse_sum();
        expect_rparen("expected ')'");
        return e;
      }
      case Tok::Ident:
        return resolve_ident(t);
      case Tok::End:
        throw ParseError("unexpected end of input", t.offset);
      default:
        throw ParseError("expected a value", t.offset);
    }
  }

  ExprPtr resolve_ident(const Token& t) {
    // Chart coordinates take priority over the named constants.
    if (auto idx = chart_.index(t.text)) {
      if (lex_.peek().kind == Tok::LParen)
        throw ParseError("'" + std::string(t.text) + "' is not a function",
                         lex_.peek().offset);
      return coordinate(*idx);
    }
    Op fop = function_op(t.text);
    if (fop != Op::Constant) {
      if (lex_.peek().kind != Tok::LParen)
        throw ParseError("function '" + std::string(t.text) + "' requires an argument list",
                         t.offset);
      lex_.take();
      ExprPtr arg = parse_sum();
      if (lex_.peek().kind == Tok::Comma)
        throw ParseError("function '" + std::string(t.text) + "' takes exactly one argument",
                         lex_.peek().offset);
      expect_rparen("expected ')' after function argument");
      return unary(fop, std::move(arg));
    }
    if (t.text == "pi") return constant(std::numbers::pi);
    if (t.text == "e") return constant(std::numbers::e);
    throw ParseError("unknown identifier '" + std::string(t.text) + "'", t.offset);
  }

  void expect_rparen(const char* msg) {
    const Token& t = lex_.peek();
    if (t.kind != Tok::RParen) throw ParseError(msg, t.offset);
    lex_.take();
  }

  Lexer lex_;
  const Chart& chart_;
};

}  // namespace

ExprPtr parse_expression(std::string_view src, const Chart& chart) {
  return Parser(src, chart).run();
}

}  // namespace srmin::expr
