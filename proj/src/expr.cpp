#include "linobs/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "linobs/format.hpp"

namespace linobs {

ParseError::ParseError(const std::string& what, std::size_t position)
    : std::runtime_error(what + " (at offset " + std::to_string(position) + ")"),
      position_(position) {}

EvalDomainError::EvalDomainError(const std::string& what, std::string subexpression)
    : std::runtime_error(what + " in '" + subexpression + "'"),
      subexpression_(std::move(subexpression)) {}

namespace {

ExprPtr make_const(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Constant;
    n->value = v;
    return n;
}

ExprPtr make_var(int idx, std::string name) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Variable;
    n->var = idx;
    n->var_name = std::move(name);
    return n;
}

ExprPtr make_unary(UnaryFunc f, ExprPtr operand) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Unary;
    n->func = f;
    n->lhs = std::move(operand);
    return n;
}

ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, int exponent = 0) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Binary;
    n->op = op;
    n->exponent = exponent;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

class Parser {
public:
    Parser(std::string_view text, int arity) : text_(text), arity_(arity) {}

    ExprPtr run() {
        ExprPtr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    std::string_view text_;
    int arity_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool peek_is(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool consume(char c) {
        if (peek_is(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    ExprPtr parse_sum() {
        ExprPtr lhs = parse_term();
        while (true) {
            if (consume('+'))
                lhs = make_binary(BinaryOp::Add, lhs, parse_term());
            else if (consume('-'))
                lhs = make_binary(BinaryOp::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_factor();
        while (true) {
            if (consume('*'))
                lhs = make_binary(BinaryOp::Mul, lhs, parse_factor());
            else if (consume('/'))
                lhs = make_binary(BinaryOp::Div, lhs, parse_factor());
            else
                return lhs;
        }
    }

    ExprPtr parse_factor() {
        if (consume('-')) {
            ExprPtr inner = parse_factor();
            if (inner->kind == ExprNode::Kind::Constant) return make_const(-inner->value);
            return make_unary(UnaryFunc::Neg, inner);
        }
        if (consume('+')) return parse_factor();
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_atom();
        if (!consume('^')) return base;
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == start) throw ParseError("exponent must be a non-negative integer literal", start);
        int exponent = 0;
        const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, exponent);
        if (res.ec != std::errc{} || exponent > 99)
            throw ParseError("exponent out of range", start);
        return make_binary(BinaryOp::Pow, base, make_const(exponent), exponent);
    }

    ExprPtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr inner = parse_sum();
            if (!consume(')')) throw ParseError("missing ')'", pos_);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    ExprPtr parse_number() {
        const std::size_t start = pos_;
        bool seen_dot = false;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '.' && !seen_dot) {
                seen_dot = true;
                ++pos_;
            } else if ((c == 'e' || c == 'E') && pos_ + 1 < text_.size()) {
                std::size_t q = pos_ + 1;
                if (text_[q] == '+' || text_[q] == '-') ++q;
                if (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) {
                    pos_ = q + 1;
                    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                        ++pos_;
                }
                break;
            } else {
                break;
            }
        }
        double v = 0.0;
        const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (res.ec != std::errc{} || res.ptr != text_.data() + pos_)
            throw ParseError("malformed number", start);
        return make_const(v);
    }

    ExprPtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name(text_.substr(start, pos_ - start));
        if (name == "exp" || name == "ln" || name == "sqrt") {
            if (!consume('(')) throw ParseError("expected '(' after function name", pos_);
            ExprPtr arg = parse_sum();
            if (!consume(')')) throw ParseError("missing ')'", pos_);
            const UnaryFunc f = name == "exp"   ? UnaryFunc::Exp
                                : name == "ln"  ? UnaryFunc::Ln
                                                : UnaryFunc::Sqrt;
            return make_unary(f, arg);
        }
        if (name == "y") {
            if (arity_ != 1) throw ParseError("variable 'y' requires a single-input expression", start);
            return make_var(0, "y");
        }
        if (name.size() >= 2 && name[0] == 'x') {
            int idx = 0;
            const auto res = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
            if (res.ec == std::errc{} && res.ptr == name.data() + name.size()) {
                if (idx < 1 || idx > arity_)
                    throw ParseError("variable index out of range: " + name, start);
                return make_var(idx - 1, name);
            }
        }
        throw ParseError("unknown identifier: " + name, start);
    }
};

int prec(const ExprNode& n) {
    switch (n.kind) {
        case ExprNode::Kind::Constant:
            return n.value < 0.0 ? 3 : 5;
        case ExprNode::Kind::Variable:
            return 5;
        case ExprNode::Kind::Unary:
            return n.func == UnaryFunc::Neg ? 3 : 5;
        case ExprNode::Kind::Binary:
            switch (n.op) {
                case BinaryOp::Add:
                case BinaryOp::Sub:
                    return 1;
                case BinaryOp::Mul:
                case BinaryOp::Div:
                    return 2;
                case BinaryOp::Pow:
                    return 4;
            }
    }
    return 5;
}

void print_node(const ExprNode& n, int min_prec, std::string& out) {
    const int p = prec(n);
    const bool wrap = p < min_prec;
    if (wrap) out += '(';
    switch (n.kind) {
        case ExprNode::Kind::Constant:
            out += fmt_double(n.value);
            break;
        case ExprNode::Kind::Variable:
            out += n.var_name;
            break;
        case ExprNode::Kind::Unary:
            switch (n.func) {
                case UnaryFunc::Neg:
                    out += '-';
                    print_node(*n.lhs, 3, out);
                    break;
                case UnaryFunc::Exp:
                    out += "exp(";
                    print_node(*n.lhs, 0, out);
                    out += ')';
                    break;
                case UnaryFunc::Ln:
                    out += "ln(";
                    print_node(*n.lhs, 0, out);
                    out += ')';
                    break;
                case UnaryFunc::Sqrt:
                    out += "sqrt(";
                    print_node(*n.lhs, 0, out);
                    out += ')';
                    break;
            }
            break;
        case ExprNode::Kind::Binary:
            switch (n.op) {
                case BinaryOp::Add:
                    print_node(*n.lhs, 1, out);
                    out += '+';
                    print_node(*n.rhs, 2, out);
                    break;
                case BinaryOp::Sub:
                    print_node(*n.lhs, 1, out);
                    out += '-';
                    print_node(*n.rhs, 2, out);
                    break;
                case BinaryOp::Mul:
                    print_node(*n.lhs, 2, out);
                    out += '*';
                    print_node(*n.rhs, 3, out);
                    break;
                case BinaryOp::Div:
                    print_node(*n.lhs, 2, out);
                    out += '/';
                    print_node(*n.rhs, 3, out);
                    break;
                case BinaryOp::Pow:
                    print_node(*n.lhs, 5, out);
                    out += '^';
                    out += std::to_string(n.exponent);
                    break;
            }
            break;
    }
    if (wrap) out += ')';
}

double ipow(double base, int k) {
    double acc = 1.0;
    for (int i = 0; i < k; ++i) acc *= base;
    return acc;
}

double eval_node(const ExprNode& n, std::span<const double> x) {
    switch (n.kind) {
        case ExprNode::Kind::Constant:
            return n.value;
        case ExprNode::Kind::Variable:
            return x[n.var];
        case ExprNode::Kind::Unary: {
            const double v = eval_node(*n.lhs, x);
            switch (n.func) {
                case UnaryFunc::Neg:
                    return -v;
                case UnaryFunc::Exp:
                    return std::exp(v);
                case UnaryFunc::Ln:
                    if (!(v > 0.0)) throw EvalDomainError("ln of non-positive value", to_string(n));
                    return std::log(v);
                case UnaryFunc::Sqrt:
                    if (!(v > 0.0)) throw EvalDomainError("sqrt of non-positive value", to_string(n));
                    return std::sqrt(v);
            }
            return 0.0;
        }
        case ExprNode::Kind::Binary: {
            const double a = eval_node(*n.lhs, x);
            if (n.op == BinaryOp::Pow) return ipow(a, n.exponent);
            const double b = eval_node(*n.rhs, x);
            switch (n.op) {
                case BinaryOp::Add:
                    return a + b;
                case BinaryOp::Sub:
                    return a - b;
                case BinaryOp::Mul:
                    return a * b;
                case BinaryOp::Div:
                    if (b == 0.0) throw EvalDomainError("division by zero", to_string(n));
                    return a / b;
                case BinaryOp::Pow:
                    break;
            }
            return 0.0;
        }
    }
    return 0.0;
}

TruncatedSeries series_node(const ExprNode& n, std::span<const TruncatedSeries> vars) {
    const int arity = vars[0].arity();
    const int order = vars[0].order();
    switch (n.kind) {
        case ExprNode::Kind::Constant:
            return TruncatedSeries::constant(arity, order, n.value);
        case ExprNode::Kind::Variable:
            return vars[n.var];
        case ExprNode::Kind::Unary: {
            TruncatedSeries v = series_node(*n.lhs, vars);
            try {
                switch (n.func) {
                    case UnaryFunc::Neg:
                        return -v;
                    case UnaryFunc::Exp:
                        return series_exp(v);
                    case UnaryFunc::Ln:
                        return series_ln(v);
                    case UnaryFunc::Sqrt:
                        return series_sqrt(v);
                }
            } catch (const std::domain_error& e) {
                throw EvalDomainError(e.what(), to_string(n));
            }
            return v;
        }
        case ExprNode::Kind::Binary: {
            TruncatedSeries a = series_node(*n.lhs, vars);
            if (n.op == BinaryOp::Pow) return a.pow_int(n.exponent);
            TruncatedSeries b = series_node(*n.rhs, vars);
            switch (n.op) {
                case BinaryOp::Add:
                    return a + b;
                case BinaryOp::Sub:
                    return a - b;
                case BinaryOp::Mul:
                    return a * b;
                case BinaryOp::Div:
                    try {
                        return a * series_reciprocal(b);
                    } catch (const std::domain_error& e) {
                        throw EvalDomainError(e.what(), to_string(n));
                    }
                case BinaryOp::Pow:
                    break;
            }
            return a;
        }
    }
    return TruncatedSeries(arity, order);
}

} // namespace

Expr parse(std::string_view text, int arity) {
    if (arity < 1) throw std::invalid_argument("parse: arity must be positive");
    Parser p(text, arity);
    return Expr(p.run(), arity);
}

std::string to_string(const ExprNode& node) {
    std::string out;
    print_node(node, 0, out);
    return out;
}

std::string to_string(const Expr& e) {
    if (e.empty()) return "";
    return to_string(*e.root());
}

bool equal(const Expr& a, const Expr& b) {
    if (a.arity() != b.arity()) return false;
    const auto rec = [](const ExprPtr& x, const ExprPtr& y, const auto& self) -> bool {
        if (!x || !y) return x == y;
        if (x->kind != y->kind) return false;
        switch (x->kind) {
            case ExprNode::Kind::Constant:
                return x->value == y->value;
            case ExprNode::Kind::Variable:
                return x->var == y->var && x->var_name == y->var_name;
            case ExprNode::Kind::Unary:
                return x->func == y->func && self(x->lhs, y->lhs, self);
            case ExprNode::Kind::Binary:
                return x->op == y->op && x->exponent == y->exponent &&
                       self(x->lhs, y->lhs, self) && self(x->rhs, y->rhs, self);
        }
        return false;
    };
    return rec(a.root(), b.root(), rec);
}

double eval(const Expr& e, std::span<const double> x) {
    if (e.empty()) throw std::invalid_argument("eval: empty expression");
    if (static_cast<int>(x.size()) < e.arity())
        throw std::invalid_argument("eval: input shorter than arity");
    return eval_node(*e.root(), x);
}

TruncatedSeries eval_over_series(const Expr& e, std::span<const TruncatedSeries> vars) {
    if (e.empty()) throw std::invalid_argument("eval_over_series: empty expression");
    if (static_cast<int>(vars.size()) < e.arity())
        throw std::invalid_argument("eval_over_series: too few variable series");
    return series_node(*e.root(), vars);
}

TruncatedSeries series_eval(const Expr& e, std::span<const double> center, int order) {
    const int arity = e.arity();
    if (static_cast<int>(center.size()) != arity)
        throw std::invalid_argument("series_eval: center length mismatch");
    std::vector<TruncatedSeries> vars;
    vars.reserve(arity);
    for (int i = 0; i < arity; ++i) {
        TruncatedSeries v = TruncatedSeries::variable(arity, order, i);
        v.coeffs()[0] = center[i];
        vars.push_back(std::move(v));
    }
    return eval_over_series(e, vars);
}

} // namespace linobs
