#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vim {

enum class UnaryOp { Neg, Exp, Log, Sin, Cos, Tan, Sqrt };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

/// Error raised while parsing expression text. position() is the 0-based
/// offset into the source string where the problem was detected.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t position);
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Error raised when evaluation hits a domain fault (log of a non-positive
/// value, sqrt of a negative value, division by zero, invalid power).
/// position() is the source offset of the offending node, or npos when the
/// tree was built programmatically.
class EvalError : public std::runtime_error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    EvalError(const std::string& message, std::size_t position);
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Immutable arithmetic expression tree over the time variable 't' and the
/// state variables 'x1'..'xd'. Trees are shared, never mutated after
/// construction, and safe to use from multiple threads.
///
/// Canonical form maintained by the factories: negation of a constant folds
/// into a negative constant, and the exponent of Pow is always a Constant.
class Expr {
public:
    enum class Kind { Constant, Time, State, Unary, Binary };

    static Expr constant(double value);
    static Expr time();
    static Expr state(int index);  // 1-based
    static Expr unary(UnaryOp op, Expr child);
    static Expr binary(BinaryOp op, Expr lhs, Expr rhs);

    Kind kind() const noexcept;
    double value() const;     // Constant only
    int index() const;        // State only
    UnaryOp unary_op() const;
    BinaryOp binary_op() const;
    Expr child() const;  // Unary
    Expr lhs() const;    // Binary
    Expr rhs() const;    // Binary

    /// Source offset when the node came from parse_expression, npos otherwise.
    std::size_t source_pos() const noexcept;

    /// Structural equality (operands compared recursively, constants by value).
    friend bool operator==(const Expr& a, const Expr& b);

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;

    friend class ExprParser;
};

/// Parses the grammar
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' number)?
///   base   := number | 't' | 'x' | 'x'<digits> | func '(' expr ')'
///           | '(' expr ')' | '-' base
/// where func is one of exp, log, sin, cos, tan, sqrt. For dimension 1 both
/// "x" and "x1" denote the single state variable; for dimension > 1 a bare
/// "x" is rejected. The exponent of '^' must be a numeric literal.
Expr parse_expression(std::string_view source, int dimension);

double eval_expression(const Expr& e, double t, std::span<const double> x);

/// Exact symbolic partial derivative with respect to x<state_index>,
/// simplified before it is returned.
Expr differentiate(const Expr& e, int state_index);

/// Constant folding plus identity rewrites (0+e, e*1, e*0, e^1, e^0,
/// -(-e), ...) applied bottom-up to a fixed point. Value-preserving at
/// every point where the input is defined.
Expr simplify(const Expr& e);

/// Canonical text form with minimal parentheses; reparsing the result gives
/// a structurally equal tree.
std::string to_string(const Expr& e);

/// Largest state-variable index referenced by the tree (0 if none).
int max_state_index(const Expr& e);

}  // namespace vim
