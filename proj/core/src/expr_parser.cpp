#include <cctype>
#include <optional>

#include "declsolve/formal.hpp"

namespace declsolve {

namespace {

constexpr int kMaxNesting = 256;

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind = Tok::End;
  std::size_t pos = 0;
  std::string text;
  Rational value;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    Token t;
    t.pos = pos_;
    if (pos_ >= src_.size()) return t;
    const char c = src_[pos_];
    if (c == '(') {
      if (auto lit = rational_literal()) return *lit;
    }
    if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) return number();
    if (is_ident_start(c)) {
      std::size_t end = pos_;
      while (end < src_.size() && is_ident_char(src_[end])) ++end;
      t.kind = Tok::Ident;
      t.text = std::string(src_.substr(pos_, end - pos_));
      pos_ = end;
      return t;
    }
    ++pos_;
    t.text = std::string(1, c);
    switch (c) {
      case '+': t.kind = Tok::Plus; return t;
      case '-': t.kind = Tok::Minus; return t;
      case '*': t.kind = Tok::Star; return t;
      case '/': t.kind = Tok::Slash; return t;
      case '^': t.kind = Tok::Caret; return t;
      case '(': t.kind = Tok::LParen; return t;
      case ')': t.kind = Tok::RParen; return t;
      default:
        throw SyntaxError(t.pos, "expression", "unexpected character '" + t.text + "'");
    }
  }

 private:
  // `(p/q)` with no whitespace inside and q != 0.
  std::optional<Token> rational_literal() {
    std::size_t i = pos_ + 1;
    const std::size_t num_begin = i;
    while (i < src_.size() && is_digit(src_[i])) ++i;
    if (i == num_begin || i >= src_.size() || src_[i] != '/') return std::nullopt;
    const std::size_t den_begin = ++i;
    while (i < src_.size() && is_digit(src_[i])) ++i;
    if (i == den_begin || i >= src_.size() || src_[i] != ')') return std::nullopt;
    auto value = Rational::try_parse(src_.substr(num_begin, i - num_begin));
    if (!value) return std::nullopt;
    Token t;
    t.kind = Tok::Number;
    t.pos = pos_;
    t.text = std::string(src_.substr(pos_, i + 1 - pos_));
    t.value = *value;
    pos_ = i + 1;
    return t;
  }

  Token number() {
    Token t;
    t.kind = Tok::Number;
    t.pos = pos_;
    std::string digits;
    std::size_t i = pos_;
    while (i < src_.size()) {
      if (is_digit(src_[i])) {
        digits += src_[i++];
      } else if (src_[i] == ',' && !digits.empty() && i + 3 < src_.size() && is_digit(src_[i + 1]) &&
                 is_digit(src_[i + 2]) && is_digit(src_[i + 3]) &&
                 (i + 4 >= src_.size() || !is_digit(src_[i + 4]))) {
        // thousands separator
        ++i;
      } else {
        break;
      }
    }
    if (i < src_.size() && src_[i] == '.' && i + 1 < src_.size() && is_digit(src_[i + 1])) {
      digits += src_[i++];
      while (i < src_.size() && is_digit(src_[i])) digits += src_[i++];
    }
    t.text = std::string(src_.substr(pos_, i - pos_));
    t.value = Rational::parse(digits);
    pos_ = i;
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) { advance(); }

  Expr parse() {
    Expr e = expression(0);
    if (current_.kind != Tok::End) {
      throw SyntaxError(current_.pos, "operator or end of input", "unexpected '" + current_.text + "'");
    }
    return e;
  }

 private:
  static int precedence(Tok kind) {
    switch (kind) {
      case Tok::Plus:
      case Tok::Minus: return 1;
      case Tok::Star:
      case Tok::Slash: return 2;
      default: return -1;
    }
  }

  static BinaryOp to_op(Tok kind) {
    switch (kind) {
      case Tok::Plus: return BinaryOp::Add;
      case Tok::Minus: return BinaryOp::Sub;
      case Tok::Star: return BinaryOp::Mul;
      default: return BinaryOp::Div;
    }
  }

  void advance() { current_ = lexer_.next(); }

  Expr expression(int min_prec) {
    Expr lhs = unary();
    for (int prec = precedence(current_.kind); prec >= min_prec && prec > 0; prec = precedence(current_.kind)) {
      const BinaryOp op = to_op(current_.kind);
      advance();
      Expr rhs = expression(prec + 1);
      lhs = Expr::binary(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr unary() {
    if (current_.kind == Tok::Minus) {
      enter();
      advance();
      Expr operand = unary();
      --nesting_;
      return Expr::neg(std::move(operand));
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (current_.kind == Tok::Caret) {
      enter();
      advance();
      Expr exponent = unary();
      --nesting_;
      return Expr::binary(BinaryOp::Pow, std::move(base), std::move(exponent));
    }
    return base;
  }

  Expr primary() {
    switch (current_.kind) {
      case Tok::Number: {
        Expr e = Expr::num(current_.value);
        advance();
        return e;
      }
      case Tok::Ident: {
        Expr e = Expr::var(current_.text);
        advance();
        return e;
      }
      case Tok::LParen: {
        enter();
        advance();
        Expr inner = expression(0);
        if (current_.kind != Tok::RParen) {
          throw SyntaxError(current_.pos, "')'", "unbalanced parenthesis");
        }
        advance();
        --nesting_;
        return inner;
      }
      case Tok::End:
        throw SyntaxError(current_.pos, "number, identifier, '(' or '-'", "unexpected end of input");
      default:
        throw SyntaxError(current_.pos, "number, identifier, '(' or '-'", "unexpected '" + current_.text + "'");
    }
  }

  void enter() {
    if (++nesting_ > kMaxNesting) throw SyntaxError(current_.pos, "shallower expression", "nesting too deep");
  }

  Lexer lexer_;
  Token current_;
  int nesting_ = 0;
};

}  // namespace

Expr parse_expression(std::string_view source) { return Parser(source).parse(); }

}  // namespace declsolve
