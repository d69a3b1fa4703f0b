#include "netdyn/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

#include "netdyn/errors.hpp"

namespace netdyn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::array<std::pair<Func, std::string_view>, 8> kFuncs{{
    {Func::Sin, "sin"},
    {Func::Cos, "cos"},
    {Func::Tan, "tan"},
    {Func::Tanh, "tanh"},
    {Func::Exp, "exp"},
    {Func::Log, "log"},
    {Func::Sqrt, "sqrt"},
    {Func::Abs, "abs"},
}};

ExprPtr make(auto node) { return std::make_shared<const Expr>(Expr{std::move(node)}); }

}  // namespace

ExprPtr number(double v) { return make(ast::Number{v}); }
ExprPtr self_var(std::size_t i) { return make(ast::SelfVar{i}); }
ExprPtr input_var(std::size_t slot, std::size_t i) { return make(ast::InputVar{slot, i}); }
ExprPtr param(std::string name) { return make(ast::Param{std::move(name)}); }
ExprPtr neg(ExprPtr e) { return make(ast::Neg{std::move(e)}); }
ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
  return make(ast::Binary{op, std::move(lhs), std::move(rhs)});
}
ExprPtr call(Func f, ExprPtr arg) { return make(ast::Call{f, std::move(arg)}); }

std::string_view func_name(Func f) {
  for (const auto& [func, name] : kFuncs) {
    if (func == f) return name;
  }
  return "?";
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      overloaded{
          [&](const ast::Number& n) { return n.value == std::get<ast::Number>(b.node).value; },
          [&](const ast::SelfVar& v) { return v.index == std::get<ast::SelfVar>(b.node).index; },
          [&](const ast::InputVar& v) {
            const auto& w = std::get<ast::InputVar>(b.node);
            return v.slot == w.slot && v.index == w.index;
          },
          [&](const ast::Param& p) { return p.name == std::get<ast::Param>(b.node).name; },
          [&](const ast::Neg& n) {
            return structurally_equal(*n.operand, *std::get<ast::Neg>(b.node).operand);
          },
          [&](const ast::Binary& x) {
            const auto& y = std::get<ast::Binary>(b.node);
            return x.op == y.op && structurally_equal(*x.lhs, *y.lhs) &&
                   structurally_equal(*x.rhs, *y.rhs);
          },
          [&](const ast::Call& c) {
            const auto& d = std::get<ast::Call>(b.node);
            return c.func == d.func && structurally_equal(*c.arg, *d.arg);
          },
      },
      a.node);
}

// ---------------------------------------------------------------------------
// Tokenizer and recursive-descent parser

namespace {

enum class Tok { Number, Ident, String, LBracket, RBracket, LParen, RParen, Plus, Minus, Star, Slash, Caret, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string_view text;
};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + std::string(t.text) + "'";
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) { advance(); }

  ExprPtr parse_all() {
    auto e = parse_expr();
    expect_kind(Tok::End, {"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"});
    return e;
  }

 private:
  static inline const std::vector<std::string> kAtomStart{
      "number", "'x['", "'u['", "'p['", "function name", "'('", "'-'"};

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    throw SyntaxError(tok_.offset, std::move(expected), describe(tok_));
  }

  void expect_kind(Tok kind, std::vector<std::string> expected) {
    if (tok_.kind != kind) fail(std::move(expected));
    advance();
  }

  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= src_.size()) {
      tok_ = {Tok::End, start, {}};
      return;
    }
    const char c = src_[pos_];
    auto single = [&](Tok k) {
      ++pos_;
      tok_ = {k, start, src_.substr(start, 1)};
    };
    switch (c) {
      case '[': return single(Tok::LBracket);
      case ']': return single(Tok::RBracket);
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case '+': return single(Tok::Plus);
      case '-': return single(Tok::Minus);
      case '*': return single(Tok::Star);
      case '/': return single(Tok::Slash);
      case '^': return single(Tok::Caret);
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return scan_number(start);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      tok_ = {Tok::Ident, start, src_.substr(start, pos_ - start)};
      return;
    }
    if (c == '"') {
      ++pos_;
      while (pos_ < src_.size() && src_[pos_] != '"') ++pos_;
      if (pos_ >= src_.size()) throw SyntaxError(start, {"'\"'"}, "unterminated string");
      ++pos_;
      tok_ = {Tok::String, start, src_.substr(start, pos_ - start)};
      return;
    }
    throw SyntaxError(start, kAtomStart, "'" + std::string(1, c) + "'");
  }

  void scan_number(std::size_t start) {
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw SyntaxError(start, {"digit"}, "'.'");
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw SyntaxError(pos_, {"exponent digits"}, "malformed exponent");
    }
    tok_ = {Tok::Number, start, src_.substr(start, pos_ - start)};
  }

  ExprPtr parse_expr() {
    auto lhs = parse_term();
    while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
      const auto op = tok_.kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
      advance();
      lhs = binary(op, std::move(lhs), parse_term());
    }
    return lhs;
  }

  ExprPtr parse_term() {
    auto lhs = parse_factor();
    while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
      const auto op = tok_.kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div;
      advance();
      lhs = binary(op, std::move(lhs), parse_factor());
    }
    return lhs;
  }

  ExprPtr parse_factor() {
    auto base = parse_atom();
    if (tok_.kind == Tok::Caret) {
      advance();
      return binary(BinaryOp::Pow, std::move(base), parse_factor());
    }
    return base;
  }

  std::size_t parse_index() {
    if (tok_.kind != Tok::Number ||
        tok_.text.find_first_not_of("0123456789") != std::string_view::npos) {
      fail({"non-negative integer"});
    }
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(tok_.text.data(), tok_.text.data() + tok_.text.size(), v);
    if (ec != std::errc{}) fail({"non-negative integer"});
    advance();
    return v;
  }

  std::size_t bracketed_index() {
    expect_kind(Tok::LBracket, {"'['"});
    auto i = parse_index();
    expect_kind(Tok::RBracket, {"']'"});
    return i;
  }

  ExprPtr parse_atom() {
    switch (tok_.kind) {
      case Tok::Number: {
        double v = 0.0;
        auto [p, ec] = std::from_chars(tok_.text.data(), tok_.text.data() + tok_.text.size(), v);
        if (ec != std::errc{} || p != tok_.text.data() + tok_.text.size()) fail({"number"});
        advance();
        return number(v);
      }
      case Tok::Minus:
        advance();
        return neg(parse_atom());
      case Tok::LParen: {
        advance();
        auto e = parse_expr();
        expect_kind(Tok::RParen, {"')'", "'+'", "'-'", "'*'", "'/'", "'^'"});
        return e;
      }
      case Tok::Ident:
        return parse_named();
      default:
        fail(kAtomStart);
    }
  }

  ExprPtr parse_named() {
    const auto name = tok_.text;
    if (name == "x") {
      advance();
      return self_var(bracketed_index());
    }
    if (name == "u") {
      advance();
      auto slot = bracketed_index();
      return input_var(slot, bracketed_index());
    }
    if (name == "p") {
      advance();
      expect_kind(Tok::LBracket, {"'['"});
      if (tok_.kind != Tok::String || tok_.text.size() < 3) fail({"quoted parameter name"});
      std::string pname(tok_.text.substr(1, tok_.text.size() - 2));
      advance();
      expect_kind(Tok::RBracket, {"']'"});
      return param(std::move(pname));
    }
    for (const auto& [func, fname] : kFuncs) {
      if (name == fname) {
        advance();
        expect_kind(Tok::LParen, {"'('"});
        auto arg = parse_expr();
        expect_kind(Tok::RParen, {"')'", "'+'", "'-'", "'*'", "'/'", "'^'"});
        return call(func, std::move(arg));
      }
    }
    fail(kAtomStart);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token tok_{Tok::End, 0, {}};
};

char op_char(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
    case BinaryOp::Pow: return '^';
  }
  return '?';
}

void print_to(const Expr& e, std::string& out) {
  std::visit(overloaded{
                 [&](const ast::Number& n) {
                   std::array<char, 64> buf{};
                   auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), n.value);
                   out.append(buf.data(), p);
                 },
                 [&](const ast::SelfVar& v) { out += "x[" + std::to_string(v.index) + "]"; },
                 [&](const ast::InputVar& v) {
                   out += "u[" + std::to_string(v.slot) + "][" + std::to_string(v.index) + "]";
                 },
                 [&](const ast::Param& p) { out += "p[\"" + p.name + "\"]"; },
                 [&](const ast::Neg& n) {
                   out += "-(";
                   print_to(*n.operand, out);
                   out += ")";
                 },
                 [&](const ast::Binary& b) {
                   out += "(";
                   print_to(*b.lhs, out);
                   out += ' ';
                   out += op_char(b.op);
                   out += ' ';
                   print_to(*b.rhs, out);
                   out += ")";
                 },
                 [&](const ast::Call& c) {
                   out += func_name(c.func);
                   out += "(";
                   print_to(*c.arg, out);
                   out += ")";
                 },
             },
             e.node);
}

double apply(Func f, double v) {
  switch (f) {
    case Func::Sin: return std::sin(v);
    case Func::Cos: return std::cos(v);
    case Func::Tan: return std::tan(v);
    case Func::Tanh: return std::tanh(v);
    case Func::Exp: return std::exp(v);
    case Func::Log: return std::log(v);
    case Func::Sqrt: return std::sqrt(v);
    case Func::Abs: return std::abs(v);
  }
  return std::nan("");
}

}  // namespace

ExprPtr parse(std::string_view text) { return Parser(text).parse_all(); }

std::string print(const Expr& e) {
  std::string out;
  print_to(e, out);
  return out;
}

Violations validate(const Expr& e, const SystemSignature& sig) {
  Violations out;
  std::visit(overloaded{
                 [&](const ast::Number&) {},
                 [&](const ast::SelfVar& v) {
                   if (v.index >= sig.self_dim) {
                     out.push_back({"x[" + std::to_string(v.index) + "]",
                                    "self index out of range (dimension " +
                                        std::to_string(sig.self_dim) + ")"});
                   }
                 },
                 [&](const ast::InputVar& v) {
                   const std::string name =
                       "u[" + std::to_string(v.slot) + "][" + std::to_string(v.index) + "]";
                   if (v.slot >= sig.slot_count()) {
                     out.push_back({name, "slot out of range (" +
                                              std::to_string(sig.slot_count()) + " slots)"});
                   } else if (v.index >= sig.input_dims[v.slot]) {
                     out.push_back({name, "input index out of range (dimension " +
                                              std::to_string(sig.input_dims[v.slot]) + ")"});
                   }
                 },
                 [&](const ast::Param& p) {
                   if (!sig.parameters.count(p.name)) {
                     out.push_back({p.name, "undeclared parameter"});
                   }
                 },
                 [&](const ast::Neg& n) {
                   auto sub = validate(*n.operand, sig);
                   out.insert(out.end(), sub.begin(), sub.end());
                 },
                 [&](const ast::Binary& b) {
                   for (const auto* child : {&b.lhs, &b.rhs}) {
                     auto sub = validate(**child, sig);
                     out.insert(out.end(), sub.begin(), sub.end());
                   }
                 },
                 [&](const ast::Call& c) {
                   auto sub = validate(*c.arg, sig);
                   out.insert(out.end(), sub.begin(), sub.end());
                 },
             },
             e.node);
  return out;
}

double eval(const Expr& e, std::span<const double> self, std::span<const Vector> inputs,
            const ParameterValues& params) {
  return std::visit(
      overloaded{
          [&](const ast::Number& n) { return n.value; },
          [&](const ast::SelfVar& v) {
            if (v.index >= self.size()) {
              throw ShapeMismatchError("x[" + std::to_string(v.index) + "] out of range");
            }
            return self[v.index];
          },
          [&](const ast::InputVar& v) {
            if (v.slot >= inputs.size() || v.index >= inputs[v.slot].size()) {
              throw ShapeMismatchError("u[" + std::to_string(v.slot) + "][" +
                                       std::to_string(v.index) + "] out of range");
            }
            return inputs[v.slot][v.index];
          },
          [&](const ast::Param& p) {
            auto it = params.find(p.name);
            if (it == params.end()) throw ShapeMismatchError("missing parameter '" + p.name + "'");
            return it->second;
          },
          [&](const ast::Neg& n) { return -eval(*n.operand, self, inputs, params); },
          [&](const ast::Binary& b) {
            const double l = eval(*b.lhs, self, inputs, params);
            const double r = eval(*b.rhs, self, inputs, params);
            switch (b.op) {
              case BinaryOp::Add: return l + r;
              case BinaryOp::Sub: return l - r;
              case BinaryOp::Mul: return l * r;
              case BinaryOp::Div: return l / r;
              case BinaryOp::Pow: return std::pow(l, r);
            }
            return std::nan("");
          },
          [&](const ast::Call& c) { return apply(c.func, eval(*c.arg, self, inputs, params)); },
      },
      e.node);
}

std::size_t referenced_slots(const Expr& e) {
  return std::visit(overloaded{
                        [](const ast::InputVar& v) { return v.slot + 1; },
                        [](const ast::Neg& n) { return referenced_slots(*n.operand); },
                        [](const ast::Binary& b) {
                          return std::max(referenced_slots(*b.lhs), referenced_slots(*b.rhs));
                        },
                        [](const ast::Call& c) { return referenced_slots(*c.arg); },
                        [](const auto&) { return std::size_t{0}; },
                    },
                    e.node);
}

ExprPtr remap_slots(const ExprPtr& e, std::span<const std::size_t> slot_map) {
  return std::visit(overloaded{
                        [&](const ast::InputVar& v) -> ExprPtr {
                          if (v.slot >= slot_map.size()) {
                            throw ShapeMismatchError("slot " + std::to_string(v.slot) +
                                                     " has no remapping");
                          }
                          return input_var(slot_map[v.slot], v.index);
                        },
                        [&](const ast::Neg& n) -> ExprPtr {
                          return neg(remap_slots(n.operand, slot_map));
                        },
                        [&](const ast::Binary& b) -> ExprPtr {
                          return binary(b.op, remap_slots(b.lhs, slot_map),
                                        remap_slots(b.rhs, slot_map));
                        },
                        [&](const ast::Call& c) -> ExprPtr {
                          return call(c.func, remap_slots(c.arg, slot_map));
                        },
                        [&](const auto&) -> ExprPtr { return e; },
                    },
                    e->node);
}

}  // namespace netdyn
