#include "vna/parser.hpp"

#include <cctype>
#include <optional>
#include <utility>
#include <vector>

namespace vna {

namespace {

enum class Tok {
  Ident, Sup, Inf, Adj, Avg, TrRe, TrIm, D, Monus, Max, Min, Abs, Sqrt,
  Imag, At, Number, LParen, RParen, Comma, Dot, Star, Plus, Minus, End,
};

struct Token {
  Tok kind;
  SourceSpan span;
  std::string text;       // identifier text
  Dyadic number;          // Number payload
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_ws();
      std::size_t start = pos_;
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, {start, start}, "", {}});
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t b = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          ++pos_;
        std::string word(src_.substr(b, pos_ - b));
        out.push_back({keyword(word), {b, pos_}, word, {}});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '-' && pos_ + 1 < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        out.push_back(number());
        continue;
      }
      Tok k;
      switch (c) {
        case '(': k = Tok::LParen; break;
        case ')': k = Tok::RParen; break;
        case ',': k = Tok::Comma; break;
        case '.': k = Tok::Dot; break;
        case '*': k = Tok::Star; break;
        case '+': k = Tok::Plus; break;
        case '-': k = Tok::Minus; break;
        case '@': k = Tok::At; break;
        default:
          throw ParseError(std::string("unexpected character '") + c + "'", {pos_, pos_ + 1});
      }
      ++pos_;
      out.push_back({k, {start, pos_}, "", {}});
    }
  }

private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  static Tok keyword(const std::string& w) {
    if (w == "sup") return Tok::Sup;
    if (w == "inf") return Tok::Inf;
    if (w == "adj") return Tok::Adj;
    if (w == "avg") return Tok::Avg;
    if (w == "trRe") return Tok::TrRe;
    if (w == "trIm") return Tok::TrIm;
    if (w == "d") return Tok::D;
    if (w == "monus") return Tok::Monus;
    if (w == "max") return Tok::Max;
    if (w == "min") return Tok::Min;
    if (w == "abs") return Tok::Abs;
    if (w == "sqrt") return Tok::Sqrt;
    if (w == "i") return Tok::Imag;
    return Tok::Ident;
  }

  Token number() {
    std::size_t b = pos_;
    if (src_[pos_] == '-') ++pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    // optional "/2^" NAT making it a dyadic literal
    if (pos_ + 2 < src_.size() && src_[pos_] == '/' && src_[pos_ + 1] == '2' &&
        src_[pos_ + 2] == '^') {
      pos_ += 3;
      std::size_t eb = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (eb == pos_) throw ParseError("missing exponent digits", {b, pos_});
    }
    auto d = try_parse_dyadic(src_.substr(b, pos_ - b));
    if (!d) throw ParseError("malformed dyadic literal", {b, pos_});
    return {Tok::Number, {b, pos_}, "", *d};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

class FormulaParser {
public:
  FormulaParser(std::string_view src, const ParseOptions& opts)
      : toks_(Lexer(src).run()), opts_(opts) {}

  FormulaPtr run() {
    FormulaPtr f = sentence();
    expect(Tok::End, "trailing input after formula");
    return f;
  }

private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool match(Tok k) {
    if (peek().kind != k) return false;
    advance();
    return true;
  }
  const Token& expect(Tok k, const char* msg) {
    if (peek().kind != k) throw ParseError(msg, peek().span);
    return advance();
  }

  FormulaPtr sentence() {
    if (peek().kind == Tok::Sup || peek().kind == Tok::Inf) {
      Quant q = peek().kind == Tok::Sup ? Quant::Sup : Quant::Inf;
      advance();
      const Token& v = expect(Tok::Ident, "expected variable name after quantifier");
      for (const auto& b : binders_) {
        if (b == v.text) throw ParseError("variable bound twice: " + v.text, v.span);
      }
      expect(Tok::Dot, "expected '.' after quantified variable");
      binders_.push_back(v.text);
      FormulaPtr body = sentence();
      binders_.pop_back();
      return Formula::quantifier(q, v.text, std::move(body));
    }
    return qf();
  }

  FormulaPtr qf() {
    FormulaPtr f = qfatom();
    while (match(Tok::Plus)) f = Formula::add(std::move(f), qfatom());
    return f;
  }

  // Is a formula-level scalar application starting here?  Either
  // NUMBER '.' or a parenthesized scalar followed by '.'.
  bool at_scalar_qf() const {
    if (peek().kind == Tok::Number && peek(1).kind == Tok::Dot) return true;
    if (peek().kind != Tok::LParen) return false;
    std::size_t i = 1;
    if (peek(i).kind != Tok::Number) return false;
    ++i;
    if (peek(i).kind == Tok::Plus || peek(i).kind == Tok::Minus) {
      ++i;
      if (peek(i).kind == Tok::Number) ++i;
      if (peek(i).kind != Tok::Imag) return false;
      ++i;
    }
    return peek(i).kind == Tok::RParen && peek(i + 1).kind == Tok::Dot;
  }

  // Parses SCALAR '.'; returns the complex scalar.
  DyadicComplex scalar() {
    SourceSpan sp = peek().span;
    DyadicComplex s;
    if (peek().kind == Tok::Number) {
      s.re = advance().number;
    } else {
      expect(Tok::LParen, "expected scalar");
      s.re = expect(Tok::Number, "expected dyadic number").number;
      if (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
        bool minus = advance().kind == Tok::Minus;
        Dyadic im(1);
        if (peek().kind == Tok::Number) im = advance().number;
        expect(Tok::Imag, "expected 'i' in complex scalar");
        s.im = minus ? -im : im;
      }
      sp.end = expect(Tok::RParen, "expected ')' after scalar").span.end;
    }
    expect(Tok::Dot, "expected '.' after scalar");
    if (!s.in_unit_disk()) throw ParseError("scalar magnitude exceeds 1", sp);
    return s;
  }

  FormulaPtr qfatom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::TrRe:
      case Tok::TrIm: {
        TracePart part = t.kind == Tok::TrRe ? TracePart::Re : TracePart::Im;
        advance();
        expect(Tok::LParen, "expected '(' after trace symbol");
        TermPtr tm = term();
        expect(Tok::RParen, "expected ')'");
        return Formula::basic(part, std::move(tm));
      }
      case Tok::D: {
        advance();
        expect(Tok::LParen, "expected '(' after d");
        TermPtr a = term();
        expect(Tok::Comma, "expected ',' in d(...)");
        TermPtr b = term();
        expect(Tok::RParen, "expected ')'");
        return Formula::dist(std::move(a), std::move(b));
      }
      case Tok::Monus:
      case Tok::Max:
      case Tok::Min: {
        Tok k = t.kind;
        advance();
        expect(Tok::LParen, "expected '('");
        FormulaPtr a = qf();
        expect(Tok::Comma, "expected ','");
        FormulaPtr b = qf();
        expect(Tok::RParen, "expected ')'");
        if (k == Tok::Monus) return Formula::monus(std::move(a), std::move(b));
        if (k == Tok::Max) return Formula::fmax(std::move(a), std::move(b));
        return Formula::fmin(std::move(a), std::move(b));
      }
      case Tok::Abs:
      case Tok::Sqrt: {
        Tok k = t.kind;
        advance();
        expect(Tok::LParen, "expected '('");
        FormulaPtr a = qf();
        expect(Tok::RParen, "expected ')'");
        return k == Tok::Abs ? Formula::abs(std::move(a)) : Formula::sqrt(std::move(a));
      }
      case Tok::Number: {
        if (at_scalar_qf()) {
          SourceSpan sp = peek().span;
          DyadicComplex s = scalar();
          if (!s.is_real())
            throw ParseError("formula-level scalar must be real", sp);
          return Formula::scale(s.re, qfatom());
        }
        return Formula::constant(advance().number);
      }
      case Tok::LParen: {
        if (at_scalar_qf()) {
          SourceSpan sp = peek().span;
          DyadicComplex s = scalar();
          if (!s.is_real())
            throw ParseError("formula-level scalar must be real", sp);
          return Formula::scale(s.re, qfatom());
        }
        advance();
        FormulaPtr f = qf();
        expect(Tok::RParen, "expected ')'");
        return f;
      }
      default:
        throw ParseError("expected a quantifier-free formula", t.span);
    }
  }

  // Same lookahead for term-level scalars.
  bool at_scalar_term() const { return at_scalar_qf(); }

  TermPtr term() {
    TermPtr t = tprim();
    while (match(Tok::Star)) t = StarTerm::product(std::move(t), tprim());
    return t;
  }

  TermPtr tprim() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Ident: {
        advance();
        for (const auto& b : binders_)
          if (b == t.text) return StarTerm::var(t.text);
        if (opts_.require_sentence)
          throw ParseError("unbound variable: " + t.text, t.span);
        return StarTerm::var(t.text);
      }
      case Tok::At: {
        advance();
        const Token& name = expect(Tok::Ident, "expected constant name after '@'");
        auto it = opts_.env.find(name.text);
        if (it == opts_.env.end())
          throw ParseError("unknown constant: @" + name.text, name.span);
        return StarTerm::constant(name.text, it->second);
      }
      case Tok::Number: {
        if (at_scalar_term()) {
          SourceSpan sp = peek().span;
          DyadicComplex s = scalar();
          return make_scaled(s, tprim(), sp);
        }
        const Dyadic& n = t.number;
        if (n == Dyadic(0)) {
          advance();
          return StarTerm::zero();
        }
        if (n == Dyadic(1)) {
          advance();
          return StarTerm::one();
        }
        throw ParseError("only 0 and 1 are term constants", t.span);
      }
      case Tok::Adj: {
        advance();
        expect(Tok::LParen, "expected '(' after adj");
        TermPtr c = term();
        expect(Tok::RParen, "expected ')'");
        return StarTerm::adj(std::move(c));
      }
      case Tok::Avg: {
        advance();
        expect(Tok::LParen, "expected '(' after avg");
        TermPtr a = term();
        expect(Tok::Comma, "expected ',' in avg(...)");
        TermPtr b = term();
        expect(Tok::RParen, "expected ')'");
        return StarTerm::average(std::move(a), std::move(b));
      }
      case Tok::LParen: {
        if (at_scalar_term()) {
          SourceSpan sp = peek().span;
          DyadicComplex s = scalar();
          return make_scaled(s, tprim(), sp);
        }
        advance();
        TermPtr c = term();
        expect(Tok::RParen, "expected ')'");
        return c;
      }
      default:
        throw ParseError("expected a term", t.span);
    }
  }

  TermPtr make_scaled(const DyadicComplex& s, TermPtr t, SourceSpan sp) {
    try {
      return StarTerm::scale(s, std::move(t));
    } catch (const PreconditionError&) {
      throw ParseError("scalar magnitude exceeds 1", sp);
    }
  }

  std::vector<Token> toks_;
  ParseOptions opts_;
  std::vector<std::string> binders_;
  std::size_t pos_ = 0;
};

}  // namespace

FormulaPtr parse_formula(std::string_view text, const ParseOptions& opts) {
  return FormulaParser(text, opts).run();
}

TracialAlgebra parse_algebra(std::string_view text) {
  // line-oriented: blank lines and '#' comments around one "blocks:" line
  std::size_t pos = 0;
  std::size_t line_start = 0;
  std::optional<std::pair<std::size_t, std::string_view>> blocks_line;
  while (pos <= text.size()) {
    if (pos == text.size() || text[pos] == '\n') {
      std::string_view line = text.substr(line_start, pos - line_start);
      std::size_t first = line.find_first_not_of(" \t\r");
      if (first != std::string_view::npos && line[first] != '#') {
        if (blocks_line)
          throw ParseError("multiple content lines in algebra spec", {line_start, pos});
        blocks_line = {line_start, line};
      }
      line_start = pos + 1;
    }
    ++pos;
  }
  if (!blocks_line) throw ParseError("empty algebra spec", {0, text.size()});
  auto [base, line] = *blocks_line;

  std::size_t i = 0;
  auto skip = [&] { while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i; };
  auto fail = [&](const std::string& msg, std::size_t at) -> ParseError {
    return ParseError(msg, {base + at, base + std::min(at + 1, line.size())});
  };
  skip();
  if (line.compare(i, 7, "blocks:") != 0) throw fail("expected 'blocks:'", i);
  i += 7;
  skip();
  if (i >= line.size() || line[i] != '[') throw fail("expected '['", i);
  ++i;
  std::vector<Block> blocks;
  for (;;) {
    skip();
    std::size_t nb = i;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (nb == i) throw fail("expected block dimension", i);
    int dim = std::stoi(std::string(line.substr(nb, i - nb)));
    if (dim < 1) throw fail("block dimension must be >= 1", nb);
    skip();
    if (i >= line.size() || line[i] != '@') throw fail("expected '@'", i);
    ++i;
    skip();
    std::size_t wb = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
           line[i] != ',' && line[i] != ']')
      ++i;
    auto w = try_parse_dyadic(line.substr(wb, i - wb));
    if (!w) throw fail("malformed dyadic weight", wb);
    if (w->sign() <= 0) throw fail("block weight must be positive", wb);
    if (*w > Dyadic(1)) throw fail("block weight exceeds 1", wb);
    blocks.push_back({dim, *w});
    skip();
    if (i < line.size() && line[i] == ',') {
      ++i;
      continue;
    }
    break;
  }
  if (i >= line.size() || line[i] != ']') throw fail("expected ']'", i);
  Dyadic total;
  for (const auto& b : blocks) total = total + b.weight;
  if (!(total == Dyadic(1)))
    throw ParseError("block weights sum to " + total.str() + ", expected 1/2^0",
                     {base, base + line.size()});
  return TracialAlgebra(std::move(blocks));
}

namespace {

std::string format_scalar(const DyadicComplex& s) {
  if (s.is_real()) return s.re.str();
  return "(" + s.re.str() + " + " + s.im.str() + " i)";
}

}  // namespace

std::string format_term(const StarTerm& t) {
  switch (t.kind()) {
    case StarTerm::Kind::Var:
      return t.name();
    case StarTerm::Kind::Zero:
      return "0";
    case StarTerm::Kind::One:
      return "1";
    case StarTerm::Kind::ConstElem:
      return "@" + t.name();
    case StarTerm::Kind::Adjoint:
      return "adj(" + format_term(*t.left()) + ")";
    case StarTerm::Kind::Scale:
      return format_scalar(t.scalar()) + " . (" + format_term(*t.left()) + ")";
    case StarTerm::Kind::Product:
      return "(" + format_term(*t.left()) + ") * (" + format_term(*t.right()) + ")";
    case StarTerm::Kind::Average:
      return "avg(" + format_term(*t.left()) + ", " + format_term(*t.right()) + ")";
  }
  return "?";
}

std::string format_formula(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Basic:
      return std::string(f.trace_part() == TracePart::Re ? "trRe" : "trIm") + "(" +
             format_term(*f.term()) + ")";
    case Formula::Kind::Dist:
      return "d(" + format_term(*f.term()) + ", " + format_term(*f.term2()) + ")";
    case Formula::Kind::Const:
      return f.value().str();
    case Formula::Kind::Add:
      return "(" + format_formula(*f.left()) + ") + (" + format_formula(*f.right()) + ")";
    case Formula::Kind::Scale:
      return f.value().str() + " . (" + format_formula(*f.left()) + ")";
    case Formula::Kind::Monus:
      return "monus(" + format_formula(*f.left()) + ", " + format_formula(*f.right()) + ")";
    case Formula::Kind::Max:
      return "max(" + format_formula(*f.left()) + ", " + format_formula(*f.right()) + ")";
    case Formula::Kind::Min:
      return "min(" + format_formula(*f.left()) + ", " + format_formula(*f.right()) + ")";
    case Formula::Kind::Abs:
      return "abs(" + format_formula(*f.left()) + ")";
    case Formula::Kind::Sqrt:
      return "sqrt(" + format_formula(*f.left()) + ")";
    case Formula::Kind::Quantifier:
      return std::string(f.quant() == Quant::Sup ? "sup " : "inf ") + f.quant_var() +
             " . " + format_formula(*f.left());
  }
  return "?";
}

}  // namespace vna
