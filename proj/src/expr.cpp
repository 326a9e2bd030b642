#include "finrec/expr.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <set>

namespace finrec {

  namespace {

    bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
    bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    // split trailing digits so that z2 sorts before z10
    bool natural_less(const std::string& a, const std::string& b) {
      auto split = [](const std::string& s) {
        std::size_t k = s.size();
        while (k > 0 && std::isdigit(static_cast<unsigned char>(s[k - 1]))) --k;
        std::string digits = s.substr(k);
        digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size()));
        return std::make_tuple(s.substr(0, k), digits.size(), digits, s);
      };
      return split(a) < split(b);
    }

    int precedence(Expression::Op op) {
      switch (op) {
        case Expression::Op::add:
        case Expression::Op::sub:
          return 1;
        case Expression::Op::mul:
        case Expression::Op::div:
          return 2;
        case Expression::Op::neg:
          return 3;
        case Expression::Op::pow:
          return 4;
        default:
          return 5;
      }
    }

    Rational rpow(Rational b, std::uint64_t e) {
      Rational r(1);
      while (e > 0) {
        if (e & 1) r *= b;
        e >>= 1;
        if (e) b *= b;
      }
      return r;
    }

  }

  class ExprParser {
  public:
    ExprParser(std::string_view text, Expression& e) : s_(text), e_(e) {}

    std::uint32_t run() {
      auto r = expr();
      skip();
      if (pos_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
      return r;
    }

  private:
    void skip() {
      while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
      skip();
      if (pos_ < s_.size() && s_[pos_] == c) {
        ++pos_;
        return true;
      }
      return false;
    }
    std::uint32_t add(Expression::Node n) {
      e_.nodes_.push_back(n);
      return static_cast<std::uint32_t>(e_.nodes_.size() - 1);
    }
    std::uint32_t binary(Expression::Op op, std::uint32_t a, std::uint32_t b) { return add({op, a, b}); }

    std::uint32_t expr() {
      auto lhs = term();
      for (;;) {
        if (accept('+')) {
          lhs = binary(Expression::Op::add, lhs, term());
        } else if (accept('-')) {
          lhs = binary(Expression::Op::sub, lhs, term());
        } else {
          return lhs;
        }
      }
    }

    std::uint32_t term() {
      auto lhs = unary();
      for (;;) {
        if (accept('*')) {
          lhs = binary(Expression::Op::mul, lhs, unary());
        } else if (accept('/')) {
          lhs = binary(Expression::Op::div, lhs, unary());
        } else {
          return lhs;
        }
      }
    }

    std::uint32_t unary() {
      if (accept('-')) return add({Expression::Op::neg, unary()});
      if (accept('+')) return unary();
      return power();
    }

    std::uint32_t power() {
      auto base = primary();
      if (!accept('^')) return base;
      skip();
      const std::size_t at = pos_;
      auto ex = unary();
      auto v = e_.eval_q(ex, {});
      if (!v) throw ParseError("exponent is not an integer constant", at);
      if (v->denominator() != 1) throw ParseError("fractional exponent", at);
      if (v->numerator() < 0) throw ParseError("negative exponent", at);
      if (!v->numerator().fits_ulong_p()) throw ParseError("exponent too large", at);
      // the exponent subtree stays in the arena but is unreachable
      Expression::Node n{Expression::Op::pow, base};
      n.small = v->numerator().get_ui();
      return add(n);
    }

    std::uint32_t primary() {
      skip();
      if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
      const char c = s_[pos_];
      if (c == '(') {
        ++pos_;
        auto r = expr();
        if (!accept(')')) throw ParseError("expected ')'", pos_);
        return r;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == '.' || ident_char(s_[pos_]))) {
          throw ParseError("malformed number", start);
        }
        mpz_class v(std::string(s_.substr(start, pos_ - start)));
        Expression::Node n{Expression::Op::literal};
        if (v.fits_ulong_p() && sizeof(unsigned long) == 8) {
          n.small = v.get_ui();
        } else {
          n.big = true;
          n.small = e_.bigs_.size();
          e_.bigs_.push_back(v);
        }
        return add(n);
      }
      if (ident_start(c)) {
        std::size_t start = pos_;
        while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
        std::string name(s_.substr(start, pos_ - start));
        auto it = std::find(e_.vars_.begin(), e_.vars_.end(), name);
        if (it == e_.vars_.end()) throw ParseError("unknown variable '" + name + "'", start);
        Expression::Node n{Expression::Op::variable};
        n.small = static_cast<std::uint64_t>(it - e_.vars_.begin());
        return add(n);
      }
      throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    std::string_view s_;
    Expression& e_;
    std::size_t pos_ = 0;
  };

  Expression Expression::parse(std::string_view text, const std::vector<std::string>& vars) {
    Expression e;
    e.vars_ = vars;
    std::set<std::string> seen;
    for (const auto& v : vars) {
      if (v.empty() || !ident_start(v[0]) || !std::all_of(v.begin(), v.end(), ident_char)) {
        throw std::invalid_argument("invalid variable name '" + v + "'");
      }
      if (!seen.insert(v).second) throw std::invalid_argument("duplicate variable '" + v + "'");
    }
    e.root_ = ExprParser(text, e).run();
    return e;
  }

  std::vector<std::string> Expression::collect_variables(std::string_view text) {
    std::set<std::string> names;
    for (std::size_t i = 0; i < text.size();) {
      if (std::isdigit(static_cast<unsigned char>(text[i]))) {
        while (i < text.size() && ident_char(text[i])) ++i;
      } else if (ident_start(text[i])) {
        std::size_t start = i;
        while (i < text.size() && ident_char(text[i])) ++i;
        names.emplace(text.substr(start, i - start));
      } else {
        ++i;
      }
    }
    std::vector<std::string> out(names.begin(), names.end());
    std::sort(out.begin(), out.end(), natural_less);
    return out;
  }

  FFInt Expression::evaluate(std::span<const FFInt> x) const {
    if (x.size() != vars_.size()) throw std::invalid_argument("wrong number of arguments");
    return eval_ff(root_, x);
  }

  std::optional<Rational> Expression::evaluate(std::span<const Rational> x) const {
    if (x.size() != vars_.size()) throw std::invalid_argument("wrong number of arguments");
    return eval_q(root_, x);
  }

  FFInt Expression::eval_ff(std::uint32_t i, std::span<const FFInt> x) const {
    const Node& n = nodes_[i];
    switch (n.op) {
      case Op::literal:
        return n.big ? FFInt(bigs_[n.small]) : FFInt(n.small);
      case Op::variable:
        return x[n.small];
      case Op::neg:
        return -eval_ff(n.a, x);
      case Op::add:
        return eval_ff(n.a, x) + eval_ff(n.b, x);
      case Op::sub:
        return eval_ff(n.a, x) - eval_ff(n.b, x);
      case Op::mul:
        return eval_ff(n.a, x) * eval_ff(n.b, x);
      case Op::div:
        return eval_ff(n.a, x) / eval_ff(n.b, x);
      case Op::pow:
        return eval_ff(n.a, x).pow(n.small);
    }
    return FFInt();
  }

  std::optional<Rational> Expression::eval_q(std::uint32_t i, std::span<const Rational> x) const {
    const Node& n = nodes_[i];
    if (n.op == Op::literal) return n.big ? Rational(bigs_[n.small]) : Rational(mpz_class(static_cast<unsigned long>(n.small)));
    if (n.op == Op::variable) {
      if (n.small >= x.size()) return std::nullopt;
      return x[n.small];
    }
    auto a = eval_q(n.a, x);
    if (!a) return std::nullopt;
    if (n.op == Op::neg) return -*a;
    if (n.op == Op::pow) return rpow(*a, n.small);
    auto b = eval_q(n.b, x);
    if (!b) return std::nullopt;
    switch (n.op) {
      case Op::add:
        return *a + *b;
      case Op::sub:
        return *a - *b;
      case Op::mul:
        return *a * *b;
      case Op::div:
        if (b->is_zero()) return std::nullopt;
        return *a / *b;
      default:
        return std::nullopt;
    }
  }

  QRationalFunction Expression::expand() const { return expand(root_); }

  QRationalFunction Expression::expand(std::uint32_t i) const {
    const std::size_t nv = vars_.size();
    const Node& n = nodes_[i];
    auto one = QPolynomial::constant(nv, Rational(1));
    switch (n.op) {
      case Op::literal: {
        auto v = eval_q(i, {});
        return {QPolynomial::constant(nv, *v), one};
      }
      case Op::variable: {
        QPolynomial p(nv);
        MultiIndex a(nv, 0);
        a[n.small] = 1;
        p.add_term(a, Rational(1));
        return {p, one};
      }
      case Op::neg: {
        auto f = expand(n.a);
        f.numerator *= Rational(-1);
        return f;
      }
      case Op::pow: {
        auto f = expand(n.a);
        QRationalFunction r{one, one};
        for (std::uint64_t k = 0; k < n.small; ++k) {
          r.numerator = r.numerator * f.numerator;
          if (!(f.denominator == one)) r.denominator = r.denominator * f.denominator;
        }
        return r;
      }
      default:
        break;
    }
    auto f = expand(n.a), g = expand(n.b);
    switch (n.op) {
      case Op::add:
      case Op::sub: {
        if (n.op == Op::sub) g.numerator *= Rational(-1);
        if (f.denominator == g.denominator) return {f.numerator + g.numerator, f.denominator};
        return {f.numerator * g.denominator + g.numerator * f.denominator, f.denominator * g.denominator};
      }
      case Op::mul:
        return {f.numerator * g.numerator, f.denominator * g.denominator};
      case Op::div:
        if (g.numerator.is_zero()) throw std::domain_error("division by zero in expansion");
        return {f.numerator * g.denominator, f.denominator * g.numerator};
      default:
        return f;
    }
  }

  std::string Expression::to_string() const {
    std::string out;
    render(root_, out);
    return out;
  }

  void Expression::render(std::uint32_t i, std::string& out) const {
    const Node& n = nodes_[i];
    auto child = [&](std::uint32_t c, bool parens) {
      if (parens) out += "(";
      render(c, out);
      if (parens) out += ")";
    };
    const int p = precedence(n.op);
    switch (n.op) {
      case Op::literal:
        out += n.big ? bigs_[n.small].get_str() : std::to_string(n.small);
        return;
      case Op::variable:
        out += vars_[n.small];
        return;
      case Op::neg:
        out += "-";
        child(n.a, precedence(nodes_[n.a].op) <= p);
        return;
      case Op::pow:
        child(n.a, precedence(nodes_[n.a].op) <= p);
        out += "^" + std::to_string(n.small);
        return;
      default: {
        child(n.a, precedence(nodes_[n.a].op) < p);
        const char* sym = n.op == Op::add ? "+" : n.op == Op::sub ? "-" : n.op == Op::mul ? "*" : "/";
        out += sym;
        child(n.b, precedence(nodes_[n.b].op) <= p);
      }
    }
  }

  ExpressionBox::ExpressionBox(std::vector<Expression> exprs) : exprs_(std::move(exprs)) {
    if (exprs_.empty()) throw std::invalid_argument("no expressions");
    n_ = exprs_.front().num_vars();
    for (const auto& e : exprs_) {
      if (e.variables() != exprs_.front().variables()) throw std::invalid_argument("expressions use different variables");
    }
  }

  std::vector<FFInt> ExpressionBox::evaluate(std::span<const FFInt> x) const {
    std::vector<FFInt> out;
    out.reserve(exprs_.size());
    for (const auto& e : exprs_) out.push_back(e.evaluate(x));
    return out;
  }

}
