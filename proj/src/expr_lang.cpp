#include "gas/expr_lang.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <set>
#include <stdexcept>

namespace gas::expr {

namespace {

const std::set<std::string> kVariables = {"m1", "m2", "m3", "x1",
                                          "x2", "x3", "t"};
const std::set<std::string> kFunctions = {"sin", "cos", "exp",
                                          "tanh", "sqrt", "log"};

NodePtr make(NodeKind k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Number;
  n->number = v;
  return n;
}

NodePtr var(const std::string& name) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Var;
  n->name = name;
  return n;
}

NodePtr call(const std::string& fn, NodePtr arg) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Call;
  n->name = fn;
  n->a = std::move(arg);
  return n;
}

struct Token {
  enum Kind { Num, Ident, Op, LParen, RParen, End } kind;
  double num = 0.0;
  char op = 0;
  std::string ident;
  int column = 0;  // 1-based
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) { advance(); }
  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    tok_ = Token{};
    tok_.column = int(pos_) + 1;
    if (pos_ >= s_.size()) {
      tok_.kind = Token::End;
      return;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* start = s_.c_str() + pos_;
      char* end = nullptr;
      tok_.num = std::strtod(start, &end);
      if (end == start) throw ParseError("malformed number", tok_.column);
      pos_ += std::size_t(end - start);
      tok_.kind = Token::Num;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = pos_;
      while (j < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_'))
        ++j;
      tok_.ident = s_.substr(pos_, j - pos_);
      pos_ = j;
      tok_.kind = Token::Ident;
      return;
    }
    ++pos_;
    switch (c) {
      case '(': tok_.kind = Token::LParen; return;
      case ')': tok_.kind = Token::RParen; return;
      case '+': case '-': case '*': case '/': case '^':
        tok_.kind = Token::Op;
        tok_.op = c;
        return;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", tok_.column);
    }
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(const std::string& s) : lex_(s) {}

  NodePtr run() {
    NodePtr e = expr();
    const Token& t = lex_.peek();
    if (t.kind != Token::End) throw ParseError("trailing input", t.column);
    return e;
  }

 private:
  NodePtr expr() {
    NodePtr e = term();
    while (lex_.peek().kind == Token::Op &&
           (lex_.peek().op == '+' || lex_.peek().op == '-')) {
      const char op = lex_.take().op;
      e = make(op == '+' ? NodeKind::Add : NodeKind::Sub, e, term());
    }
    return e;
  }

  NodePtr term() {
    NodePtr e = unary();
    while (lex_.peek().kind == Token::Op &&
           (lex_.peek().op == '*' || lex_.peek().op == '/')) {
      const char op = lex_.take().op;
      e = make(op == '*' ? NodeKind::Mul : NodeKind::Div, e, unary());
    }
    return e;
  }

  NodePtr unary() {
    if (lex_.peek().kind == Token::Op && lex_.peek().op == '-') {
      lex_.take();
      return make(NodeKind::Neg, unary());
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (lex_.peek().kind == Token::Op && lex_.peek().op == '^') {
      lex_.take();
      return make(NodeKind::Pow, base, unary());
    }
    return base;
  }

  NodePtr primary() {
    Token t = lex_.take();
    switch (t.kind) {
      case Token::Num:
        return number(t.num);
      case Token::Ident: {
        if (t.ident == "pi") return number(M_PI);
        if (kFunctions.count(t.ident)) {
          const Token& open = lex_.peek();
          if (open.kind != Token::LParen)
            throw ParseError("expected '(' after function '" + t.ident + "'",
                             open.column);
          lex_.take();
          NodePtr arg = expr();
          const Token& close = lex_.peek();
          if (close.kind != Token::RParen)
            throw ParseError("expected ')' closing call of '" + t.ident + "'",
                             close.column);
          lex_.take();
          return call(t.ident, arg);
        }
        if (kVariables.count(t.ident)) return var(t.ident);
        throw ParseError("unknown identifier '" + t.ident + "'", t.column);
      }
      case Token::LParen: {
        NodePtr e = expr();
        const Token& close = lex_.peek();
        if (close.kind != Token::RParen)
          throw ParseError("expected ')'", close.column);
        lex_.take();
        return e;
      }
      case Token::RParen:
        throw ParseError("unexpected ')'", t.column);
      case Token::Op:
        throw ParseError(std::string("unexpected operator '") + t.op + "'", t.column);
      case Token::End:
        throw ParseError("unexpected end of expression", t.column);
    }
    throw ParseError("unexpected token", t.column);
  }

  Lexer lex_;
};

}  // namespace

NodePtr parse_expr(const std::string& text) { return Parser(text).run(); }

double eval(const NodePtr& e, const Bindings& b) {
  switch (e->kind) {
    case NodeKind::Number: return e->number;
    case NodeKind::Var: {
      if (e->name == "t") return b.t;
      const int i = e->name[1] - '1';
      return e->name[0] == 'm' ? b.m[i] : b.x[i];
    }
    case NodeKind::Neg: return -eval(e->a, b);
    case NodeKind::Add: return eval(e->a, b) + eval(e->b, b);
    case NodeKind::Sub: return eval(e->a, b) - eval(e->b, b);
    case NodeKind::Mul: return eval(e->a, b) * eval(e->b, b);
    case NodeKind::Div: return eval(e->a, b) / eval(e->b, b);
    case NodeKind::Pow: return std::pow(eval(e->a, b), eval(e->b, b));
    case NodeKind::Call: {
      const double x = eval(e->a, b);
      if (e->name == "sin") return std::sin(x);
      if (e->name == "cos") return std::cos(x);
      if (e->name == "exp") return std::exp(x);
      if (e->name == "tanh") return std::tanh(x);
      if (e->name == "sqrt") return std::sqrt(x);
      return std::log(x);
    }
  }
  throw std::logic_error("eval: bad node");
}

NodePtr differentiate(const NodePtr& e, const std::string& v) {
  switch (e->kind) {
    case NodeKind::Number: return number(0.0);
    case NodeKind::Var: return number(e->name == v ? 1.0 : 0.0);
    case NodeKind::Neg: return make(NodeKind::Neg, differentiate(e->a, v));
    case NodeKind::Add:
      return make(NodeKind::Add, differentiate(e->a, v), differentiate(e->b, v));
    case NodeKind::Sub:
      return make(NodeKind::Sub, differentiate(e->a, v), differentiate(e->b, v));
    case NodeKind::Mul:
      return make(NodeKind::Add,
                  make(NodeKind::Mul, differentiate(e->a, v), e->b),
                  make(NodeKind::Mul, e->a, differentiate(e->b, v)));
    case NodeKind::Div:
      // (a/b)' = a'/b - a b'/b^2
      return make(NodeKind::Sub,
                  make(NodeKind::Div, differentiate(e->a, v), e->b),
                  make(NodeKind::Div, make(NodeKind::Mul, e->a, differentiate(e->b, v)),
                       make(NodeKind::Mul, e->b, e->b)));
    case NodeKind::Pow: {
      // d(a^b) = a^b * (b' log a + b a'/a)
      NodePtr ab = make(NodeKind::Pow, e->a, e->b);
      NodePtr t1 = make(NodeKind::Mul, differentiate(e->b, v), call("log", e->a));
      NodePtr t2 = make(NodeKind::Div, make(NodeKind::Mul, e->b, differentiate(e->a, v)),
                        e->a);
      return make(NodeKind::Mul, ab, make(NodeKind::Add, t1, t2));
    }
    case NodeKind::Call: {
      NodePtr da = differentiate(e->a, v);
      NodePtr outer;
      if (e->name == "sin") outer = call("cos", e->a);
      else if (e->name == "cos") outer = make(NodeKind::Neg, call("sin", e->a));
      else if (e->name == "exp") outer = call("exp", e->a);
      else if (e->name == "tanh") {
        NodePtr th = call("tanh", e->a);
        outer = make(NodeKind::Sub, number(1.0), make(NodeKind::Mul, th, th));
      } else if (e->name == "sqrt") {
        outer = make(NodeKind::Div, number(0.5), call("sqrt", e->a));
      } else {  // log
        outer = make(NodeKind::Div, number(1.0), e->a);
      }
      return make(NodeKind::Mul, outer, da);
    }
  }
  throw std::logic_error("differentiate: bad node");
}

static void collect(const NodePtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == NodeKind::Var) out.insert(e->name);
  collect(e->a, out);
  collect(e->b, out);
}

std::vector<std::string> free_variables(const NodePtr& e) {
  std::set<std::string> s;
  collect(e, s);
  return {s.begin(), s.end()};
}

}  // namespace gas::expr
