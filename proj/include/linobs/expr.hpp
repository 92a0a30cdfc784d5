#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "linobs/taylor.hpp"

namespace linobs {

enum class UnaryFunc { Exp, Ln, Sqrt, Neg };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    enum class Kind { Constant, Variable, Unary, Binary };
    Kind kind;
    double value = 0.0;          // Constant
    int var = -1;                // Variable: 0-based index
    std::string var_name;        // Variable: surface name (x1, x2, ..., y)
    UnaryFunc func{};            // Unary
    BinaryOp op{};               // Binary
    int exponent = 0;            // Binary Pow: literal exponent
    ExprPtr lhs, rhs;
};

/// Immutable scalar expression in a fixed number of variables. Variables are
/// named x1..xn; a single-variable expression may instead use the name y.
class Expr {
public:
    Expr() = default;
    Expr(ExprPtr root, int arity) : root_(std::move(root)), arity_(arity) {}

    bool empty() const { return root_ == nullptr; }
    int arity() const { return arity_; }
    const ExprPtr& root() const { return root_; }

private:
    ExprPtr root_;
    int arity_ = 0;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position);
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

class EvalDomainError : public std::runtime_error {
public:
    EvalDomainError(const std::string& what, std::string subexpression);
    const std::string& subexpression() const { return subexpression_; }

private:
    std::string subexpression_;
};

/// Grammar: + - * / ^ with usual precedence, parentheses, unary minus,
/// exp/ln/sqrt calls, decimal literals, and variables x1..x<arity> (or y when
/// arity is 1). Exponents must be non-negative integer literals.
Expr parse(std::string_view text, int arity);

/// Canonical text form; parse(to_string(e)) reproduces the same tree.
std::string to_string(const Expr& e);
std::string to_string(const ExprNode& node);

/// Structural equality of trees (used by round-trip checks).
bool equal(const Expr& a, const Expr& b);

double eval(const Expr& e, std::span<const double> x);

/// Evaluate with each variable replaced by a given series.
TruncatedSeries eval_over_series(const Expr& e, std::span<const TruncatedSeries> vars);

/// Taylor expansion about a center point, up to the given total degree.
TruncatedSeries series_eval(const Expr& e, std::span<const double> center, int order);

} // namespace linobs
