#pragma once

// Lexer and recursive-descent parser for the surface syntax.  The grammar is
// OCaml-flavored; see the README for the full table.  Notes:
//   * `-` only introduces negative integer literals (there is no minus
//     operator), so it must be immediately followed by a digit.
//   * `(* ... *)` comments nest.
//   * `??` is the printer's hole token and is rejected here: holes are
//     created by hole-substitution only, never by parsing.
//   * A file may be a bare `let [rec] x ... = e` with no `in`; the body then
//     defaults to the bound name itself.

#include <cctype>
#include <string>
#include <vector>

#include "nate/lang.hpp"

namespace nate {

namespace detail {

enum class Tok : uint8_t {
  Let, Rec, In, Fun, Arrow, If, Then, Else, Match, With, Bar,
  LBrack, RBrack, LPar, RPar, Comma, Semi, Plus, ConsOp, Eq, HoleTok,
  Int, True, False, Ident, End,
};

struct Token {
  Tok tok;
  std::string text;
  long long value = 0;
  uint32_t lo = 0, hi = 0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t = next();
      out.push_back(t);
      if (t.tok == Tok::End) break;
    }
    return out;
  }

 private:
  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;

  [[noreturn]] void fail(const std::string& msg) {
    throw SyntaxError(line_, col_, msg);
  }

  char peek(size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (pos_ < src_.size()) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_space() {
    for (;;) {
      while (std::isspace(static_cast<unsigned char>(peek()))) advance();
      if (peek() == '(' && peek(1) == '*') {
        int depth = 0;
        int sl = line_, sc = col_;
        do {
          if (pos_ >= src_.size())
            throw SyntaxError(sl, sc, "unterminated comment");
          if (peek() == '(' && peek(1) == '*') {
            ++depth;
            advance();
            advance();
          } else if (peek() == '*' && peek(1) == ')') {
            --depth;
            advance();
            advance();
          } else {
            advance();
          }
        } while (depth > 0);
        continue;
      }
      break;
    }
  }

  Token make(Tok t, uint32_t lo) {
    Token tk;
    tk.tok = t;
    tk.lo = lo;
    tk.hi = static_cast<uint32_t>(pos_);
    tk.text = src_.substr(lo, pos_ - lo);
    tk.line = line_;
    tk.col = col_ - static_cast<int>(pos_ - lo);
    return tk;
  }

  Token next() {
    uint32_t lo = static_cast<uint32_t>(pos_);
    char c = peek();
    if (c == '\0') return make(Tok::End, lo);
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      bool neg = c == '-';
      if (neg) advance();
      long long v = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        int d = peek() - '0';
        if (v > (0x7fffffffffffffffLL - d) / 10) fail("integer literal overflow");
        v = v * 10 + d;
        advance();
      }
      Token t = make(Tok::Int, lo);
      t.value = neg ? -v : v;
      return t;
    }
    if (c == '-') {
      if (peek(1) == '>') {
        advance();
        advance();
        return make(Tok::Arrow, lo);
      }
      fail("'-' must start a negative integer literal");
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (std::isalnum(static_cast<unsigned char>(peek())) ||
             peek() == '_' || peek() == '\'')
        advance();
      Token t = make(Tok::Ident, lo);
      if (t.text == "let") t.tok = Tok::Let;
      else if (t.text == "rec") t.tok = Tok::Rec;
      else if (t.text == "in") t.tok = Tok::In;
      else if (t.text == "fun") t.tok = Tok::Fun;
      else if (t.text == "if") t.tok = Tok::If;
      else if (t.text == "then") t.tok = Tok::Then;
      else if (t.text == "else") t.tok = Tok::Else;
      else if (t.text == "match") t.tok = Tok::Match;
      else if (t.text == "with") t.tok = Tok::With;
      else if (t.text == "true") t.tok = Tok::True;
      else if (t.text == "false") t.tok = Tok::False;
      return t;
    }
    switch (c) {
      case '|': advance(); return make(Tok::Bar, lo);
      case '[': advance(); return make(Tok::LBrack, lo);
      case ']': advance(); return make(Tok::RBrack, lo);
      case '(': advance(); return make(Tok::LPar, lo);
      case ')': advance(); return make(Tok::RPar, lo);
      case ',': advance(); return make(Tok::Comma, lo);
      case ';': advance(); return make(Tok::Semi, lo);
      case '+': advance(); return make(Tok::Plus, lo);
      case '=': advance(); return make(Tok::Eq, lo);
      case ':':
        if (peek(1) == ':') {
          advance();
          advance();
          return make(Tok::ConsOp, lo);
        }
        fail("expected '::'");
      case '?':
        if (peek(1) == '?') {
          advance();
          advance();
          return make(Tok::HoleTok, lo);
        }
        fail("unexpected '?'");
      default:
        fail(std::string("unexpected character '") + c + "'");
    }
  }
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ExprPtr parse_program() {
    ExprPtr e;
    if (cur().tok == Tok::Let) {
      e = parse_let(/*top_level=*/true);
    } else {
      e = parse_expr();
    }
    expect(Tok::End, "end of input");
    return e;
  }

 private:
  std::vector<Token> toks_;
  size_t idx_ = 0;

  const Token& cur() const { return toks_[idx_]; }
  const Token& prev() const { return toks_[idx_ - 1]; }
  void bump() { ++idx_; }

  [[noreturn]] void fail(const std::string& msg) {
    throw SyntaxError(cur().line, cur().col, msg);
  }

  const Token& expect(Tok t, const std::string& what) {
    if (cur().tok != t) fail("expected " + what);
    const Token& tk = cur();
    bump();
    return tk;
  }

  static ExprPtr with_span(ExprPtr e, uint32_t lo, uint32_t hi) {
    auto m = std::const_pointer_cast<Expr>(e);
    m->span = {lo, hi};
    return m;
  }

  bool starts_atom(Tok t) const {
    switch (t) {
      case Tok::Int:
      case Tok::True:
      case Tok::False:
      case Tok::Ident:
      case Tok::LBrack:
      case Tok::LPar:
        return true;
      default:
        return false;
    }
  }

  ExprPtr parse_expr() {
    switch (cur().tok) {
      case Tok::Let: return parse_let(false);
      case Tok::Fun: return parse_fun();
      case Tok::If: return parse_if();
      case Tok::Match: return parse_match();
      case Tok::HoleTok:
        fail("'?\?' is reserved for hole substitution and cannot be parsed");
      default: return parse_cons();
    }
  }

  // let [rec] x p1 p2 ... = e1 [in e2]
  ExprPtr parse_let(bool top_level) {
    uint32_t lo = cur().lo;
    expect(Tok::Let, "'let'");
    bool rec = false;
    if (cur().tok == Tok::Rec) {
      rec = true;
      bump();
    }
    Token name = expect(Tok::Ident, "binder name");
    std::vector<Token> params;
    while (cur().tok == Tok::Ident) {
      params.push_back(cur());
      bump();
    }
    expect(Tok::Eq, "'='");
    ExprPtr bound = parse_expr();
    // Parameters desugar to nested functions; each keeps a span from its
    // own token to the end of the bound expression.
    for (size_t i = params.size(); i-- > 0;) {
      uint32_t flo = params[i].lo;
      uint32_t fhi = bound->span.hi;
      bound = with_span(Expr::fun(params[i].text, bound), flo, fhi);
    }
    ExprPtr body;
    uint32_t hi;
    if (cur().tok == Tok::In) {
      bump();
      body = parse_expr();
      hi = body->span.hi;
    } else if (top_level && cur().tok == Tok::End) {
      // Bare top-level definition: the program's value is the binding.
      body = with_span(Expr::var(name.text), name.lo, name.hi);
      hi = prev().hi;
    } else {
      fail("expected 'in'");
    }
    return with_span(Expr::let(name.text, rec, bound, body), lo, hi);
  }

  ExprPtr parse_fun() {
    uint32_t lo = cur().lo;
    expect(Tok::Fun, "'fun'");
    std::vector<Token> params;
    params.push_back(expect(Tok::Ident, "parameter name"));
    while (cur().tok == Tok::Ident) {
      params.push_back(cur());
      bump();
    }
    expect(Tok::Arrow, "'->'");
    ExprPtr body = parse_expr();
    uint32_t hi = body->span.hi;
    for (size_t i = params.size(); i-- > 0;) {
      uint32_t flo = i == 0 ? lo : params[i].lo;
      body = with_span(Expr::fun(params[i].text, body), flo, hi);
    }
    return body;
  }

  ExprPtr parse_if() {
    uint32_t lo = cur().lo;
    expect(Tok::If, "'if'");
    ExprPtr c = parse_expr();
    expect(Tok::Then, "'then'");
    ExprPtr t = parse_expr();
    expect(Tok::Else, "'else'");
    ExprPtr f = parse_expr();
    return with_span(Expr::if_(c, t, f), lo, f->span.hi);
  }

  // match e with [] -> e1 | h :: t -> e2      (nil arm first)
  // match e with (a, b) -> e1
  ExprPtr parse_match() {
    uint32_t lo = cur().lo;
    expect(Tok::Match, "'match'");
    ExprPtr scrut = parse_expr();
    expect(Tok::With, "'with'");
    if (cur().tok == Tok::Bar) bump();
    if (cur().tok == Tok::LBrack) {
      bump();
      expect(Tok::RBrack, "']'");
      expect(Tok::Arrow, "'->'");
      ExprPtr nil_body = parse_expr();
      expect(Tok::Bar, "'|'");
      Token hd = expect(Tok::Ident, "head binder");
      expect(Tok::ConsOp, "'::'");
      Token tl = expect(Tok::Ident, "tail binder");
      expect(Tok::Arrow, "'->'");
      ExprPtr cons_body = parse_expr();
      return with_span(
          Expr::list_case(scrut, nil_body, hd.text, tl.text, cons_body), lo,
          cons_body->span.hi);
    }
    if (cur().tok == Tok::LPar) {
      bump();
      Token a = expect(Tok::Ident, "pair binder");
      expect(Tok::Comma, "','");
      Token b = expect(Tok::Ident, "pair binder");
      expect(Tok::RPar, "')'");
      expect(Tok::Arrow, "'->'");
      ExprPtr body = parse_expr();
      return with_span(Expr::pair_case(scrut, a.text, b.text, body), lo,
                       body->span.hi);
    }
    fail("expected '[]' or '(' pattern");
  }

  ExprPtr parse_cons() {
    ExprPtr head = parse_plus();
    if (cur().tok == Tok::ConsOp) {
      bump();
      ExprPtr tail = parse_cons();  // right associative
      return with_span(Expr::cons(head, tail), head->span.lo, tail->span.hi);
    }
    return head;
  }

  ExprPtr parse_plus() {
    ExprPtr acc = parse_app();
    while (cur().tok == Tok::Plus) {
      bump();
      // The right operand may itself be a prefix form (`1 + if ...` is not
      // valid OCaml, so require an application-level operand).
      ExprPtr rhs = parse_app();
      acc = with_span(Expr::plus(acc, rhs), acc->span.lo, rhs->span.hi);
    }
    return acc;
  }

  ExprPtr parse_app() {
    ExprPtr acc = parse_atom();
    while (starts_atom(cur().tok)) {
      ExprPtr arg = parse_atom();
      acc = with_span(Expr::app(acc, arg), acc->span.lo, arg->span.hi);
    }
    return acc;
  }

  ExprPtr parse_atom() {
    const Token t = cur();
    switch (t.tok) {
      case Tok::Int:
        bump();
        return with_span(Expr::int_lit(t.value), t.lo, t.hi);
      case Tok::True:
      case Tok::False:
        bump();
        return with_span(Expr::bool_lit(t.tok == Tok::True), t.lo, t.hi);
      case Tok::Ident:
        bump();
        return with_span(Expr::var(t.text), t.lo, t.hi);
      case Tok::LBrack: {
        bump();
        if (cur().tok == Tok::RBrack) {
          uint32_t hi = cur().hi;
          bump();
          return with_span(Expr::nil(), t.lo, hi);
        }
        // [e1; e2; ...] is sugar for e1 :: e2 :: ... :: []
        std::vector<ExprPtr> elems;
        elems.push_back(parse_expr());
        while (cur().tok == Tok::Semi) {
          bump();
          elems.push_back(parse_expr());
        }
        const Token& close = expect(Tok::RBrack, "']'");
        ExprPtr acc = with_span(Expr::nil(), close.lo, close.hi);
        for (size_t i = elems.size(); i-- > 0;) {
          uint32_t lo = i == 0 ? t.lo : elems[i]->span.lo;
          acc = with_span(Expr::cons(elems[i], acc), lo, close.hi);
        }
        return acc;
      }
      case Tok::LPar: {
        bump();
        ExprPtr e = parse_expr();
        if (cur().tok == Tok::Comma) {
          bump();
          ExprPtr snd = parse_expr();
          const Token& close = expect(Tok::RPar, "')'");
          return with_span(Expr::pair(e, snd), t.lo, close.hi);
        }
        const Token& close = expect(Tok::RPar, "')'");
        // Keep the parens inside the span so spans always nest.
        return with_span(e, t.lo, close.hi);
      }
      case Tok::HoleTok:
        fail("'?\?' is reserved for hole substitution and cannot be parsed");
      default:
        fail("expected an expression");
    }
  }
};

}  // namespace detail

inline Program parse(const std::string& source) {
  detail::Lexer lex(source);
  detail::Parser parser(lex.run());
  ExprPtr root = parser.parse_program();
  return flatten(root, source);
}

}  // namespace nate
