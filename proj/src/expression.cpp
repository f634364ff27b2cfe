#include "randset/expression.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "randset/errors.hpp"

namespace randset {

namespace {

using Node = Expression::Node;
using NodePtr = Expression::NodePtr;

struct Token {
  enum class Type { number, ident, plus, minus, star, slash, caret, lparen,
                    rparen, end };
  Type type;
  std::string text;
  double value = 0.0;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r')) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
    current_.line = line_;
    current_.column = col_;
    if (pos_ >= text_.size()) {
      current_.type = Token::Type::end;
      current_.text = "<end>";
      return;
    }
    char c = text_[pos_];
    auto single = [&](Token::Type type) {
      current_.type = type;
      current_.text = std::string(1, c);
      ++pos_;
      ++col_;
    };
    switch (c) {
      case '+': single(Token::Type::plus); return;
      case '-': single(Token::Type::minus); return;
      case '*': single(Token::Type::star); return;
      case '/': single(Token::Type::slash); return;
      case '^': single(Token::Type::caret); return;
      case '(': single(Token::Type::lparen); return;
      case ')': single(Token::Type::rparen); return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '.'))
        ++pos_;
      // Exponent part.
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        size_t at = pos_ + 1;
        if (at < text_.size() && (text_[at] == '+' || text_[at] == '-')) ++at;
        if (at < text_.size() && std::isdigit(static_cast<unsigned char>(text_[at]))) {
          pos_ = at;
          while (pos_ < text_.size() &&
                 std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        }
      }
      current_.type = Token::Type::number;
      current_.text = text_.substr(start, pos_ - start);
      size_t used = 0;
      try {
        current_.value = std::stod(current_.text, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != current_.text.size())
        throw ParseError("malformed number '" + current_.text + "'", line_,
                         col_, "number");
      col_ += static_cast<int>(pos_ - start);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_'))
        ++pos_;
      current_.type = Token::Type::ident;
      current_.text = text_.substr(start, pos_ - start);
      col_ += static_cast<int>(pos_ - start);
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_,
                     col_, "expression");
  }

  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token current_;
};

NodePtr make_const(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::constant;
  n->value = v;
  return n;
}

NodePtr make_binary(Node::Kind kind, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : lexer_(text) {}

  NodePtr parse() {
    NodePtr e = parse_expr();
    const Token& t = lexer_.peek();
    if (t.type != Token::Type::end)
      throw ParseError("unexpected token '" + t.text + "'", t.line, t.column,
                       "operator or end of input");
    return e;
  }

 private:
  NodePtr parse_expr() {
    NodePtr left = parse_term();
    while (true) {
      const Token& t = lexer_.peek();
      if (t.type == Token::Type::plus) {
        lexer_.take();
        left = make_binary(Node::Kind::add, left, parse_term());
      } else if (t.type == Token::Type::minus) {
        lexer_.take();
        left = make_binary(Node::Kind::sub, left, parse_term());
      } else {
        return left;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr left = parse_unary();
    while (true) {
      const Token& t = lexer_.peek();
      if (t.type == Token::Type::star) {
        lexer_.take();
        left = make_binary(Node::Kind::mul, left, parse_unary());
      } else if (t.type == Token::Type::slash) {
        lexer_.take();
        left = make_binary(Node::Kind::div, left, parse_unary());
      } else {
        return left;
      }
    }
  }

  NodePtr parse_unary() {
    const Token& t = lexer_.peek();
    if (t.type == Token::Type::minus) {
      lexer_.take();
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::unary_minus;
      n->a = parse_unary();
      return n;
    }
    if (t.type == Token::Type::plus) {
      lexer_.take();
      return parse_unary();
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (lexer_.peek().type == Token::Type::caret) {
      lexer_.take();
      // Right associative; the exponent may carry its own sign.
      return make_binary(Node::Kind::pow, base, parse_unary());
    }
    return base;
  }

  NodePtr parse_primary() {
    Token t = lexer_.take();
    switch (t.type) {
      case Token::Type::number:
        return make_const(t.value);
      case Token::Type::lparen: {
        NodePtr e = parse_expr();
        Token close = lexer_.take();
        if (close.type != Token::Type::rparen)
          throw ParseError("expected ')' but found '" + close.text + "'",
                           close.line, close.column, ")");
        return e;
      }
      case Token::Type::ident:
        return parse_ident(t);
      default:
        throw ParseError("unexpected token '" + t.text + "'", t.line, t.column,
                         "number, variable, function call, or '('");
    }
  }

  NodePtr parse_ident(const Token& t) {
    static const std::pair<const char*, Expression::Func> kFuncs[] = {
        {"sin", Expression::Func::sin},   {"cos", Expression::Func::cos},
        {"exp", Expression::Func::exp},   {"log", Expression::Func::log},
        {"log10", Expression::Func::log10}, {"abs", Expression::Func::abs},
    };
    for (const auto& [name, func] : kFuncs) {
      if (t.text == name) {
        Token open = lexer_.take();
        if (open.type != Token::Type::lparen)
          throw ParseError("function '" + t.text + "' needs an argument list",
                           open.line, open.column, "(");
        NodePtr arg = parse_expr();
        Token close = lexer_.take();
        if (close.type != Token::Type::rparen)
          throw ParseError("expected ')' closing call to '" + t.text + "'",
                           close.line, close.column, ")");
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::call;
        n->func = func;
        n->a = arg;
        return n;
      }
    }
    // Variables: x<k> or w<k>, 1-based.
    if ((t.text[0] == 'x' || t.text[0] == 'w') && t.text.size() > 1) {
      bool digits = true;
      for (size_t i = 1; i < t.text.size(); ++i)
        digits = digits && std::isdigit(static_cast<unsigned char>(t.text[i]));
      if (digits) {
        int index = std::stoi(t.text.substr(1));
        if (index < 1)
          throw ParseError("variable indices are 1-based", t.line, t.column,
                           "x1.., w1..");
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::variable;
        n->var_kind = t.text[0] == 'x' ? Expression::VarKind::state
                                       : Expression::VarKind::noise;
        n->var_index = index - 1;
        return n;
      }
    }
    throw ParseError("unknown identifier '" + t.text + "'", t.line, t.column,
                     "x<k>, w<k>, or a function name");
  }

  Lexer lexer_;
};

bool is_integer(double v) {
  return std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e9;
}

void print_node(const Node* n, std::ostringstream& out) {
  switch (n->kind) {
    case Node::Kind::constant: {
      out << n->value;
      return;
    }
    case Node::Kind::variable:
      out << (n->var_kind == Expression::VarKind::state ? 'x' : 'w')
          << (n->var_index + 1);
      return;
    case Node::Kind::unary_minus:
      out << "(-";
      print_node(n->a.get(), out);
      out << ")";
      return;
    case Node::Kind::add:
    case Node::Kind::sub:
    case Node::Kind::mul:
    case Node::Kind::div:
    case Node::Kind::pow: {
      const char* op = n->kind == Node::Kind::add   ? " + "
                       : n->kind == Node::Kind::sub ? " - "
                       : n->kind == Node::Kind::mul ? "*"
                       : n->kind == Node::Kind::div ? "/"
                                                    : "^";
      out << "(";
      print_node(n->a.get(), out);
      out << op;
      print_node(n->b.get(), out);
      out << ")";
      return;
    }
    case Node::Kind::call: {
      const char* name = nullptr;
      switch (n->func) {
        case Expression::Func::sin: name = "sin"; break;
        case Expression::Func::cos: name = "cos"; break;
        case Expression::Func::exp: name = "exp"; break;
        case Expression::Func::log: name = "log"; break;
        case Expression::Func::log10: name = "log10"; break;
        case Expression::Func::abs: name = "abs"; break;
      }
      out << name << "(";
      print_node(n->a.get(), out);
      out << ")";
      return;
    }
  }
}

[[noreturn]] void domain_error(const char* what, const Node* node) {
  std::ostringstream out;
  out << what << " in '";
  print_node(node, out);
  out << "'";
  throw DomainError(out.str());
}

}  // namespace

Expression parse_expression(const std::string& text) {
  Parser parser(text);
  return Expression(parser.parse());
}

void Expression::compile() {
  program_.clear();
  state_arity_ = 0;
  noise_arity_ = 0;
  if (root_) emit(root_);
  // The evaluator uses a fixed stack; verify the program fits it.
  int depth = 0, max_depth = 0;
  for (const Op& op : program_) {
    switch (op.code) {
      case Op::Code::push_const:
      case Op::Code::push_state:
      case Op::Code::push_noise:
        max_depth = std::max(max_depth, ++depth);
        break;
      case Op::Code::add:
      case Op::Code::sub:
      case Op::Code::mul:
      case Op::Code::div:
      case Op::Code::pow_real:
        --depth;
        break;
      default:
        break;
    }
  }
  if (max_depth > 63)
    throw ConfigError("Expression: nesting too deep for the evaluator");
}

void Expression::emit(const NodePtr& node) {
  const Node* n = node.get();
  switch (n->kind) {
    case Node::Kind::constant:
      program_.push_back({Op::Code::push_const, n->value, 0, n});
      return;
    case Node::Kind::variable:
      if (n->var_kind == VarKind::state) {
        state_arity_ = std::max(state_arity_, n->var_index + 1);
        program_.push_back({Op::Code::push_state, 0.0, n->var_index, n});
      } else {
        noise_arity_ = std::max(noise_arity_, n->var_index + 1);
        program_.push_back({Op::Code::push_noise, 0.0, n->var_index, n});
      }
      return;
    case Node::Kind::unary_minus:
      emit(n->a);
      program_.push_back({Op::Code::neg, 0.0, 0, n});
      return;
    case Node::Kind::add:
    case Node::Kind::sub:
    case Node::Kind::mul:
    case Node::Kind::div:
      emit(n->a);
      emit(n->b);
      program_.push_back({n->kind == Node::Kind::add   ? Op::Code::add
                          : n->kind == Node::Kind::sub ? Op::Code::sub
                          : n->kind == Node::Kind::mul ? Op::Code::mul
                                                       : Op::Code::div,
                          0.0, 0, n});
      return;
    case Node::Kind::pow:
      emit(n->a);
      // Integer exponents run by repeated multiplication, for determinism.
      if (n->b->kind == Node::Kind::constant && is_integer(n->b->value)) {
        program_.push_back(
            {Op::Code::pow_int, 0.0, static_cast<int>(n->b->value), n});
      } else if (n->b->kind == Node::Kind::unary_minus &&
                 n->b->a->kind == Node::Kind::constant &&
                 is_integer(n->b->a->value)) {
        program_.push_back(
            {Op::Code::pow_int, 0.0, -static_cast<int>(n->b->a->value), n});
      } else {
        emit(n->b);
        program_.push_back({Op::Code::pow_real, 0.0, 0, n});
      }
      return;
    case Node::Kind::call: {
      emit(n->a);
      Op::Code code = Op::Code::call_sin;
      switch (n->func) {
        case Func::sin: code = Op::Code::call_sin; break;
        case Func::cos: code = Op::Code::call_cos; break;
        case Func::exp: code = Op::Code::call_exp; break;
        case Func::log: code = Op::Code::call_log; break;
        case Func::log10: code = Op::Code::call_log10; break;
        case Func::abs: code = Op::Code::call_abs; break;
      }
      program_.push_back({code, 0.0, 0, n});
      return;
    }
  }
}

double Expression::evaluate(const Eigen::VectorXd& x,
                            const Eigen::VectorXd& w) const {
  if (empty()) throw ConfigError("Expression: empty");
  if (x.size() < state_arity_)
    throw DimensionError("Expression: state vector too short");
  if (w.size() < noise_arity_)
    throw DimensionError("Expression: noise vector too short");

  double stack[64];
  int top = -1;
  for (const Op& op : program_) {
    switch (op.code) {
      case Op::Code::push_const: stack[++top] = op.value; break;
      case Op::Code::push_state: stack[++top] = x[op.index]; break;
      case Op::Code::push_noise: stack[++top] = w[op.index]; break;
      case Op::Code::neg: stack[top] = -stack[top]; break;
      case Op::Code::add: --top; stack[top] += stack[top + 1]; break;
      case Op::Code::sub: --top; stack[top] -= stack[top + 1]; break;
      case Op::Code::mul: --top; stack[top] *= stack[top + 1]; break;
      case Op::Code::div:
        --top;
        if (stack[top + 1] == 0.0) domain_error("division by zero", op.node);
        stack[top] /= stack[top + 1];
        break;
      case Op::Code::pow_int: {
        double base = stack[top];
        int e = op.index;
        if (e < 0 && base == 0.0)
          domain_error("zero raised to a negative power", op.node);
        double acc = 1.0;
        for (int i = 0; i < std::abs(e); ++i) acc *= base;
        stack[top] = e < 0 ? 1.0 / acc : acc;
        break;
      }
      case Op::Code::pow_real: {
        --top;
        double base = stack[top], e = stack[top + 1];
        if (base < 0.0) domain_error("negative base with real exponent", op.node);
        if (base == 0.0 && e < 0.0)
          domain_error("zero raised to a negative power", op.node);
        stack[top] = std::pow(base, e);
        break;
      }
      case Op::Code::call_sin: stack[top] = std::sin(stack[top]); break;
      case Op::Code::call_cos: stack[top] = std::cos(stack[top]); break;
      case Op::Code::call_exp: stack[top] = std::exp(stack[top]); break;
      case Op::Code::call_log:
        if (stack[top] <= 0.0) domain_error("log of a nonpositive value", op.node);
        stack[top] = std::log(stack[top]);
        break;
      case Op::Code::call_log10:
        if (stack[top] <= 0.0) domain_error("log10 of a nonpositive value", op.node);
        stack[top] = std::log10(stack[top]);
        break;
      case Op::Code::call_abs: stack[top] = std::abs(stack[top]); break;
    }
  }
  return stack[0];
}

std::string Expression::print() const {
  if (empty()) return "";
  std::ostringstream out;
  out.precision(17);
  print_node(root_.get(), out);
  return out.str();
}

}  // namespace randset
