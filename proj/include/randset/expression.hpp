#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

namespace randset {

// Arithmetic expressions over state variables x1..xn and noise variables
// w1..wm: infix grammar with +, -, *, /, right-associative ^, unary signs,
// parentheses, and the call syntax sin, cos, exp, log, log10, abs.
// log is the natural logarithm.
class Expression {
 public:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  enum class VarKind { state, noise };
  enum class Func { sin, cos, exp, log, log10, abs };

  struct Node {
    enum class Kind { constant, variable, unary_minus, add, sub, mul, div, pow, call };
    Kind kind;
    double value = 0.0;        // constant
    VarKind var_kind = VarKind::state;
    int var_index = 0;         // zero-based
    Func func = Func::sin;
    NodePtr a, b;
  };

  Expression() = default;
  explicit Expression(NodePtr root) : root_(std::move(root)) { compile(); }

  bool empty() const { return root_ == nullptr; }
  const NodePtr& root() const { return root_; }

  // Largest referenced index + 1, per variable kind.
  int state_arity() const { return state_arity_; }
  int noise_arity() const { return noise_arity_; }

  // Throws DomainError naming the offending subexpression.
  double evaluate(const Eigen::VectorXd& x, const Eigen::VectorXd& w) const;

  // Infix text that reparses to a structurally identical tree.
  std::string print() const;

 private:
  struct Op {
    enum class Code {
      push_const, push_state, push_noise, neg, add, sub, mul, div,
      pow_int, pow_real, call_sin, call_cos, call_exp, call_log,
      call_log10, call_abs
    };
    Code code;
    double value = 0.0;
    int index = 0;
    const Node* node = nullptr;
  };

  void compile();
  void emit(const NodePtr& node);

  NodePtr root_;
  std::vector<Op> program_;
  int state_arity_ = 0;
  int noise_arity_ = 0;
};

// Parses the documented grammar; ParseError carries line, column, and the
// expected-token set.
Expression parse_expression(const std::string& text);

}  // namespace randset
