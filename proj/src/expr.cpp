#include "projeq/expr.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <utility>

#include <fmt/format.h>

#include "projeq/errors.hpp"

namespace projeq::expr {

namespace {

struct FunctionEntry {
  const char* name;
  Function function;
};

constexpr FunctionEntry kFunctions[] = {
    {"sin", Function::kSin},   {"cos", Function::kCos},   {"exp", Function::kExp},
    {"ln", Function::kLn},     {"sqrt", Function::kSqrt}, {"abs", Function::kAbs},
};

std::optional<Function> lookup_function(std::string_view name) {
  for (const auto& entry : kFunctions) {
    if (name == entry.name) return entry.function;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Lexer

enum class TokenKind { kNumber, kIdentifier, kOperator, kLParen, kRParen, kComma, kEnd };

struct Token {
  TokenKind kind;
  std::size_t offset;
  std::string_view text;
  double number = 0.0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token next() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    const std::size_t start = pos_;
    if (pos_ >= text_.size()) {
      current_ = {TokenKind::kEnd, start, {}};
      return;
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      lex_number(start);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      current_ = {TokenKind::kIdentifier, start, text_.substr(start, pos_ - start)};
      return;
    }
    ++pos_;
    switch (c) {
      case '+':
      case '-':
      case '*':
      case '/':
      case '^':
        current_ = {TokenKind::kOperator, start, text_.substr(start, 1)};
        return;
      case '(':
        current_ = {TokenKind::kLParen, start, text_.substr(start, 1)};
        return;
      case ')':
        current_ = {TokenKind::kRParen, start, text_.substr(start, 1)};
        return;
      case ',':
        current_ = {TokenKind::kComma, start, text_.substr(start, 1)};
        return;
      default:
        throw ParseError(fmt::format("unexpected character '{}'", c), start);
    }
  }

  // decimal literal: digits [ '.' digits ] [ ('e'|'E') [sign] digits ]
  void lex_number(std::size_t start) {
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw ParseError("malformed number", start);
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw ParseError("malformed exponent in number", start);
    }
    const std::string literal(text_.substr(start, pos_ - start));
    errno = 0;
    const double value = std::strtod(literal.c_str(), nullptr);
    if (errno == ERANGE && !std::isfinite(value)) {
      throw ParseError("numeric literal out of range", start);
    }
    current_ = {TokenKind::kNumber, start, text_.substr(start, pos_ - start), value};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Token current_{TokenKind::kEnd, 0, {}};
};

// ---------------------------------------------------------------------------
// Pratt parser

constexpr int kAddPower = 10;
constexpr int kMulPower = 20;
constexpr int kUnaryPower = 25;
constexpr int kPowPower = 30;

using NodePtr = std::shared_ptr<const Node>;

bool depends_on_coordinates(const Node& n) {
  if (n.kind == NodeKind::kVariable) return true;
  if (n.lhs && depends_on_coordinates(*n.lhs)) return true;
  if (n.rhs && depends_on_coordinates(*n.rhs)) return true;
  return false;
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& coordinates)
      : lexer_(text), coordinates_(coordinates) {}

  NodePtr parse_all() {
    if (lexer_.peek().kind == TokenKind::kEnd) {
      throw ParseError("empty expression", lexer_.peek().offset);
    }
    NodePtr root = parse_expression(0);
    const Token& t = lexer_.peek();
    if (t.kind != TokenKind::kEnd) throw unexpected(t);
    return root;
  }

 private:
  static ParseError unexpected(const Token& t) {
    if (t.kind == TokenKind::kEnd) return ParseError("unexpected end of input", t.offset);
    return ParseError(fmt::format("unexpected '{}'", t.text), t.offset);
  }

  static int binding_power(const Token& t) {
    if (t.kind != TokenKind::kOperator) return -1;
    switch (t.text[0]) {
      case '+':
      case '-':
        return kAddPower;
      case '*':
      case '/':
        return kMulPower;
      case '^':
        return kPowPower;
      default:
        return -1;
    }
  }

  NodePtr parse_expression(int min_power) {
    NodePtr lhs = parse_prefix();
    for (;;) {
      const Token& t = lexer_.peek();
      const int power = binding_power(t);
      if (power < 0 || power <= min_power) break;
      const Token op = lexer_.next();
      auto node = std::make_shared<Node>();
      node->offset = op.offset;
      node->lhs = lhs;
      switch (op.text[0]) {
        case '+':
          node->kind = NodeKind::kAdd;
          node->rhs = parse_expression(kAddPower);
          break;
        case '-':
          node->kind = NodeKind::kSub;
          node->rhs = parse_expression(kAddPower);
          break;
        case '*':
          node->kind = NodeKind::kMul;
          node->rhs = parse_expression(kMulPower);
          break;
        case '/':
          node->kind = NodeKind::kDiv;
          node->rhs = parse_expression(kMulPower);
          break;
        case '^':
          node->kind = NodeKind::kPow;
          // One less than kPowPower makes '^' right-associative; a leading
          // unary minus in the exponent is accepted.
          {
            const std::size_t exponent_offset = lexer_.peek().offset;
            node->rhs = parse_expression(kPowPower - 1);
            if (depends_on_coordinates(*node->rhs)) {
              throw ParseError("exponent must not depend on coordinates", exponent_offset);
            }
          }
          break;
      }
      lhs = node;
    }
    return lhs;
  }

  NodePtr parse_prefix() {
    const Token t = lexer_.next();
    switch (t.kind) {
      case TokenKind::kNumber: {
        auto node = std::make_shared<Node>();
        node->kind = NodeKind::kConstant;
        node->offset = t.offset;
        node->value = t.number;
        return node;
      }
      case TokenKind::kOperator:
        if (t.text[0] == '-') {
          auto node = std::make_shared<Node>();
          node->kind = NodeKind::kNeg;
          node->offset = t.offset;
          node->lhs = parse_expression(kUnaryPower);
          return node;
        }
        throw unexpected(t);
      case TokenKind::kLParen: {
        NodePtr inner = parse_expression(0);
        expect_rparen();
        return inner;
      }
      case TokenKind::kIdentifier:
        return parse_identifier(t);
      default:
        throw unexpected(t);
    }
  }

  NodePtr parse_identifier(const Token& t) {
    if (auto f = lookup_function(t.text)) {
      if (lexer_.peek().kind != TokenKind::kLParen) {
        throw ParseError(fmt::format("function '{}' must be followed by '('", t.text),
                         lexer_.peek().offset);
      }
      lexer_.next();
      if (lexer_.peek().kind == TokenKind::kRParen) {
        throw ParseError(fmt::format("function '{}' expects 1 argument, got 0", t.text),
                         t.offset);
      }
      NodePtr arg = parse_expression(0);
      std::size_t arity = 1;
      while (lexer_.peek().kind == TokenKind::kComma) {
        lexer_.next();
        parse_expression(0);
        ++arity;
      }
      if (arity != 1) {
        throw ParseError(
            fmt::format("function '{}' expects 1 argument, got {}", t.text, arity), t.offset);
      }
      expect_rparen();
      auto node = std::make_shared<Node>();
      node->kind = NodeKind::kCall;
      node->offset = t.offset;
      node->function = *f;
      node->lhs = arg;
      return node;
    }
    for (std::size_t i = 0; i < coordinates_.size(); ++i) {
      if (coordinates_[i] == t.text) {
        auto node = std::make_shared<Node>();
        node->kind = NodeKind::kVariable;
        node->offset = t.offset;
        node->variable = static_cast<int>(i);
        return node;
      }
    }
    throw ParseError(fmt::format("unknown identifier '{}'", t.text), t.offset);
  }

  void expect_rparen() {
    const Token& t = lexer_.peek();
    if (t.kind != TokenKind::kRParen) {
      if (t.kind == TokenKind::kEnd) throw ParseError("missing ')'", t.offset);
      throw unexpected(t);
    }
    lexer_.next();
  }

  Lexer lexer_;
  const std::vector<std::string>& coordinates_;
};

// ---------------------------------------------------------------------------
// Evaluation. The real path mirrors the jet kernel's constant-term
// arithmetic (a / b computed as a * (1 / b), integer powers by repeated
// squaring) so both agree bit for bit.

double integer_power(double base, long e) {
  double result = 1.0;
  while (e > 0) {
    if (e & 1) result *= base;
    e >>= 1;
    if (e > 0) base *= base;
  }
  return result;
}

double real_pow(double base, double exponent) {
  const double rounded = std::round(exponent);
  if (rounded == exponent && std::abs(exponent) <= 64.0) {
    long e = static_cast<long>(rounded);
    if (e < 0) {
      if (base == 0.0) throw SingularInputError("pow", "zero constant term in denominator");
      return integer_power(1.0 / base, -e);
    }
    return integer_power(base, e);
  }
  if (!(base > 0.0)) {
    throw SingularInputError("pow", "fractional power of a non-positive constant term");
  }
  return std::pow(base, exponent);
}

double apply(Function f, double x) {
  switch (f) {
    case Function::kSin:
      return std::sin(x);
    case Function::kCos:
      return std::cos(x);
    case Function::kExp:
      return std::exp(x);
    case Function::kLn:
      if (!(x > 0.0)) throw SingularInputError("ln", "non-positive constant term");
      return std::log(x);
    case Function::kSqrt:
      if (!(x > 0.0)) throw SingularInputError("sqrt", "non-positive constant term");
      return std::sqrt(x);
    case Function::kAbs:
      if (x == 0.0) throw SingularInputError("abs", "zero constant term");
      return std::abs(x);
  }
  return 0.0;
}

Jet apply(Function f, const Jet& x) {
  switch (f) {
    case Function::kSin:
      return sin(x);
    case Function::kCos:
      return cos(x);
    case Function::kExp:
      return exp(x);
    case Function::kLn:
      return log(x);
    case Function::kSqrt:
      return sqrt(x);
    case Function::kAbs:
      return abs(x);
  }
  return x;
}

double divide(double a, double b) {
  if (b == 0.0) throw SingularInputError("div", "zero constant term in denominator");
  return a * (1.0 / b);
}
Jet divide(const Jet& a, const Jet& b) { return a / b; }

double make_constant(double v, std::span<const double>) { return v; }
Jet make_constant(double v, std::span<const Jet> values) {
  return Jet(values.front().nvars(), values.front().order(), v);
}

double exponent_value(const Node& n);

template <typename T>
T eval_node(const Node& n, std::span<const T> values) {
  try {
    switch (n.kind) {
      case NodeKind::kConstant:
        return make_constant(n.value, values);
      case NodeKind::kVariable:
        return values[n.variable];
      case NodeKind::kNeg:
        return -eval_node(*n.lhs, values);
      case NodeKind::kAdd:
        return eval_node(*n.lhs, values) + eval_node(*n.rhs, values);
      case NodeKind::kSub:
        return eval_node(*n.lhs, values) - eval_node(*n.rhs, values);
      case NodeKind::kMul:
        return eval_node(*n.lhs, values) * eval_node(*n.rhs, values);
      case NodeKind::kDiv:
        return divide(eval_node(*n.lhs, values), eval_node(*n.rhs, values));
      case NodeKind::kPow: {
        T base = eval_node(*n.lhs, values);
        const double e = exponent_value(*n.rhs);
        if constexpr (std::is_same_v<T, double>) {
          return real_pow(base, e);
        } else {
          return pow(base, e);
        }
      }
      case NodeKind::kCall:
        return apply(n.function, eval_node(*n.lhs, values));
    }
  } catch (const SingularInputError& e) {
    if (e.location()) throw;
    throw e.with_location(n.offset);
  }
  throw Error("corrupt expression tree");
}

double exponent_value(const Node& n) {
  return eval_node<double>(n, std::span<const double>{});
}

// ---------------------------------------------------------------------------
// Printing

int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::kAdd:
    case NodeKind::kSub:
      return 1;
    case NodeKind::kMul:
    case NodeKind::kDiv:
      return 2;
    case NodeKind::kNeg:
      return 3;
    case NodeKind::kPow:
      return 4;
    case NodeKind::kConstant:
      return n.value < 0.0 || std::signbit(n.value) ? 0 : 5;
    default:
      return 5;
  }
}

void print(const Node& n, const std::vector<std::string>& coords, std::string& out);

void print_wrapped(const Node& n, bool wrap, const std::vector<std::string>& coords,
                   std::string& out) {
  if (wrap) out += '(';
  print(n, coords, out);
  if (wrap) out += ')';
}

void print(const Node& n, const std::vector<std::string>& coords, std::string& out) {
  switch (n.kind) {
    case NodeKind::kConstant:
      out += fmt::format("{}", n.value);
      return;
    case NodeKind::kVariable:
      out += coords[n.variable];
      return;
    case NodeKind::kNeg:
      out += '-';
      print_wrapped(*n.lhs, precedence(*n.lhs) < 3, coords, out);
      return;
    case NodeKind::kAdd:
    case NodeKind::kSub:
    case NodeKind::kMul:
    case NodeKind::kDiv: {
      const int p = precedence(n);
      print_wrapped(*n.lhs, precedence(*n.lhs) < p, coords, out);
      const char* op = n.kind == NodeKind::kAdd   ? " + "
                       : n.kind == NodeKind::kSub ? " - "
                       : n.kind == NodeKind::kMul ? "*"
                                                  : "/";
      out += op;
      const int rp = precedence(*n.rhs);
      print_wrapped(*n.rhs, rp <= p || n.rhs->kind == NodeKind::kNeg, coords, out);
      return;
    }
    case NodeKind::kPow:
      print_wrapped(*n.lhs, precedence(*n.lhs) < 5, coords, out);
      out += '^';
      print_wrapped(*n.rhs, precedence(*n.rhs) < 3, coords, out);
      return;
    case NodeKind::kCall:
      out += function_name(n.function);
      out += '(';
      print(*n.lhs, coords, out);
      out += ')';
      return;
  }
}

bool same_node(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::kConstant:
      return a.value == b.value;
    case NodeKind::kVariable:
      return a.variable == b.variable;
    case NodeKind::kCall:
      if (a.function != b.function) return false;
      break;
    default:
      break;
  }
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
  if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
  if (a.lhs && !same_node(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !same_node(*a.rhs, *b.rhs)) return false;
  return true;
}

}  // namespace

const char* function_name(Function f) {
  for (const auto& entry : kFunctions) {
    if (entry.function == f) return entry.name;
  }
  return "?";
}

bool is_function_name(std::string_view name) { return lookup_function(name).has_value(); }

Expression::Expression(std::shared_ptr<const Node> root, std::vector<std::string> coordinates)
    : root_(std::move(root)), coordinates_(std::move(coordinates)) {}

double Expression::eval(std::span<const double> values) const {
  if (values.size() != coordinates_.size()) {
    throw ShapeError(fmt::format("expression over {} coordinates evaluated with {} values",
                                 coordinates_.size(), values.size()));
  }
  return eval_node<double>(*root_, values);
}

Jet Expression::eval(std::span<const Jet> values) const {
  if (values.size() != coordinates_.size()) {
    throw ShapeError(fmt::format("expression over {} coordinates evaluated with {} jets",
                                 coordinates_.size(), values.size()));
  }
  if (values.empty()) throw ShapeError("jet evaluation needs at least one coordinate");
  for (const auto& v : values) {
    if (!v.same_shape(values.front())) throw ShapeError("coordinate jets differ in shape");
  }
  return eval_node<Jet>(*root_, values);
}

std::string Expression::to_string() const {
  std::string out;
  print(*root_, coordinates_, out);
  return out;
}

bool Expression::same_tree(const Expression& other) const {
  return coordinates_ == other.coordinates_ && same_node(*root_, *other.root_);
}

Expression parse(std::string_view text, const std::vector<std::string>& coordinates) {
  Parser parser(text, coordinates);
  return Expression(parser.parse_all(), coordinates);
}

Jet eval_jet(const Expression& e, std::span<const double> point, int order) {
  const auto seeds = seed_coordinates(point, order);
  return e.eval(std::span<const Jet>(seeds));
}

}  // namespace projeq::expr
