#include "vim/expr.hpp"

#include <cassert>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <utility>

namespace vim {

struct Expr::Node {
    Kind kind;
    double value = 0.0;  // Constant
    int index = 0;       // State
    UnaryOp uop = UnaryOp::Neg;
    BinaryOp bop = BinaryOp::Add;
    std::shared_ptr<const Node> a;  // unary child / binary lhs
    std::shared_ptr<const Node> b;  // binary rhs
    std::size_t pos = EvalError::npos;
};

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error(message + " (position " + std::to_string(position) + ")"),
      position_(position) {}

EvalError::EvalError(const std::string& message, std::size_t position)
    : std::runtime_error(position == npos ? message
                                          : message + " (position " + std::to_string(position) + ")"),
      position_(position) {}

Expr Expr::constant(double value) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Constant;
    n->value = value;
    return Expr(std::move(n));
}

Expr Expr::time() {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Time;
    return Expr(std::move(n));
}

Expr Expr::state(int index) {
    if (index < 1) throw std::invalid_argument("state variable index must be >= 1");
    auto n = std::make_shared<Node>();
    n->kind = Kind::State;
    n->index = index;
    return Expr(std::move(n));
}

Expr Expr::unary(UnaryOp op, Expr child) {
    // Keep trees canonical: a negated constant is a negative constant.
    if (op == UnaryOp::Neg && child.kind() == Kind::Constant) {
        return constant(-child.value());
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::Unary;
    n->uop = op;
    n->a = child.node_;
    return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
    if (op == BinaryOp::Pow && rhs.kind() != Kind::Constant) {
        throw std::invalid_argument("power exponent must be a constant");
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::Binary;
    n->bop = op;
    n->a = lhs.node_;
    n->b = rhs.node_;
    return Expr(std::move(n));
}

Expr::Kind Expr::kind() const noexcept { return node_->kind; }

double Expr::value() const {
    assert(kind() == Kind::Constant);
    return node_->value;
}

int Expr::index() const {
    assert(kind() == Kind::State);
    return node_->index;
}

UnaryOp Expr::unary_op() const {
    assert(kind() == Kind::Unary);
    return node_->uop;
}

BinaryOp Expr::binary_op() const {
    assert(kind() == Kind::Binary);
    return node_->bop;
}

Expr Expr::child() const {
    assert(kind() == Kind::Unary);
    return Expr(node_->a);
}

Expr Expr::lhs() const {
    assert(kind() == Kind::Binary);
    return Expr(node_->a);
}

Expr Expr::rhs() const {
    assert(kind() == Kind::Binary);
    return Expr(node_->b);
}

std::size_t Expr::source_pos() const noexcept { return node_->pos; }

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case Expr::Kind::Constant: return a.value() == b.value();
        case Expr::Kind::Time: return true;
        case Expr::Kind::State: return a.index() == b.index();
        case Expr::Kind::Unary:
            return a.unary_op() == b.unary_op() && a.child() == b.child();
        case Expr::Kind::Binary:
            return a.binary_op() == b.binary_op() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
    }
    return false;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class ExprParser {
public:
    ExprParser(std::string_view source, int dimension)
        : src_(source), dim_(dimension) {}

    Expr parse() {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) {
            throw ParseError(std::string("unexpected character '") + src_[pos_] + "'", pos_);
        }
        return e;
    }

private:
    static constexpr int max_depth = 256;

    std::string_view src_;
    int dim_;
    std::size_t pos_ = 0;
    int depth_ = 0;

    static Expr at(Expr e, std::size_t pos) {
        auto n = std::make_shared<Expr::Node>(*e.node_);
        n->pos = pos;
        return Expr(std::move(n));
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    bool consume(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr parse_expr() {
        Expr e = parse_term();
        while (true) {
            std::size_t op_pos = (skip_ws(), pos_);
            if (consume('+')) {
                e = at(Expr::binary(BinaryOp::Add, e, parse_term()), op_pos);
            } else if (consume('-')) {
                e = at(Expr::binary(BinaryOp::Sub, e, parse_term()), op_pos);
            } else {
                return e;
            }
        }
    }

    Expr parse_term() {
        Expr e = parse_factor();
        while (true) {
            std::size_t op_pos = (skip_ws(), pos_);
            if (consume('*')) {
                e = at(Expr::binary(BinaryOp::Mul, e, parse_factor()), op_pos);
            } else if (consume('/')) {
                e = at(Expr::binary(BinaryOp::Div, e, parse_factor()), op_pos);
            } else {
                return e;
            }
        }
    }

    Expr parse_factor() {
        Expr b = parse_base();
        std::size_t op_pos = (skip_ws(), pos_);
        if (consume('^')) {
            return at(Expr::binary(BinaryOp::Pow, b, parse_exponent()), op_pos);
        }
        return b;
    }

    // The exponent is a numeric literal (optionally signed), never a
    // subexpression; this keeps the power rule of differentiation total.
    Expr parse_exponent() {
        skip_ws();
        std::size_t start = pos_;
        std::size_t probe = pos_;
        if (probe < src_.size() && (src_[probe] == '+' || src_[probe] == '-')) ++probe;
        if (probe >= src_.size() ||
            !(std::isdigit(static_cast<unsigned char>(src_[probe])) || src_[probe] == '.')) {
            throw ParseError("exponent must be a numeric constant", pos_);
        }
        bool negative = false;
        if (src_[pos_] == '+' || src_[pos_] == '-') {
            negative = (src_[pos_] == '-');
            ++pos_;
        }
        double v = parse_number_token();
        return at(Expr::constant(negative ? -v : v), start);
    }

    Expr parse_base() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        if (++depth_ > max_depth) throw ParseError("expression nested too deeply", pos_);
        struct DepthGuard {
            int& d;
            ~DepthGuard() { --d; }
        } guard{depth_};
        std::size_t start = pos_;
        char c = src_[pos_];

        if (c == '-') {
            ++pos_;
            return at(Expr::unary(UnaryOp::Neg, parse_base()), start);
        }
        if (c == '(') {
            ++pos_;
            Expr e = parse_expr();
            if (!consume(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return at(Expr::constant(parse_number_token()), start);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::string name = parse_identifier();
            if (name == "t") return at(Expr::time(), start);
            if (name[0] == 'x') {
                return at(parse_state_ref(name, start), start);
            }
            static constexpr std::pair<std::string_view, UnaryOp> funcs[] = {
                {"exp", UnaryOp::Exp}, {"log", UnaryOp::Log},  {"sin", UnaryOp::Sin},
                {"cos", UnaryOp::Cos}, {"tan", UnaryOp::Tan},  {"sqrt", UnaryOp::Sqrt},
            };
            for (const auto& [fname, op] : funcs) {
                if (name == fname) {
                    if (!consume('(')) throw ParseError("expected '(' after '" + name + "'", pos_);
                    Expr arg = parse_expr();
                    if (!consume(')')) throw ParseError("expected ')'", pos_);
                    return at(Expr::unary(op, arg), start);
                }
            }
            throw ParseError("unknown identifier '" + name + "'", start);
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    Expr parse_state_ref(const std::string& name, std::size_t start) {
        if (name == "x") {
            if (dim_ > 1) {
                throw ParseError("bare 'x' is ambiguous for dimension " + std::to_string(dim_) +
                                     "; use x1..x" + std::to_string(dim_),
                                 start);
            }
            return Expr::state(1);
        }
        for (std::size_t i = 1; i < name.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(name[i]))) {
                throw ParseError("unknown identifier '" + name + "'", start);
            }
        }
        int idx = 0;
        auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
        if (ec != std::errc() || idx < 1 || idx > dim_) {
            throw ParseError("state variable index out of range in '" + name + "' (dimension " +
                                 std::to_string(dim_) + ")",
                             start);
        }
        return Expr::state(idx);
    }

    std::string parse_identifier() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])))) {
            ++pos_;
        }
        return std::string(src_.substr(start, pos_ - start));
    }

    double parse_number_token() {
        std::size_t start = pos_;
        bool digits = false;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
            digits = true;
        }
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                digits = true;
            }
        }
        if (!digits) throw ParseError("expected a number", start);
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                    ++pos_;
                }
            } else {
                pos_ = mark;  // 'e' belongs to something else; not an exponent
            }
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
        if (ec != std::errc() || ptr != src_.data() + pos_) {
            throw ParseError("malformed number", start);
        }
        return v;
    }
};

Expr parse_expression(std::string_view source, int dimension) {
    if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
    if (source.empty()) throw ParseError("empty expression", 0);
    return ExprParser(source, dimension).parse();
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

bool is_integer_valued(double v) { return std::isfinite(v) && v == std::floor(v); }

double apply_unary(UnaryOp op, double v, std::size_t pos) {
    switch (op) {
        case UnaryOp::Neg: return -v;
        case UnaryOp::Exp: return std::exp(v);
        case UnaryOp::Log:
            if (v <= 0.0) throw EvalError("log of non-positive value", pos);
            return std::log(v);
        case UnaryOp::Sin: return std::sin(v);
        case UnaryOp::Cos: return std::cos(v);
        case UnaryOp::Tan: return std::tan(v);
        case UnaryOp::Sqrt:
            if (v < 0.0) throw EvalError("sqrt of negative value", pos);
            return std::sqrt(v);
    }
    return 0.0;
}

double apply_binary(BinaryOp op, double a, double b, std::size_t pos) {
    switch (op) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div:
            if (b == 0.0) throw EvalError("division by zero", pos);
            return a / b;
        case BinaryOp::Pow:
            if (a < 0.0 && !is_integer_valued(b)) {
                throw EvalError("fractional power of negative value", pos);
            }
            if (a == 0.0 && b < 0.0) throw EvalError("zero raised to negative power", pos);
            return std::pow(a, b);
    }
    return 0.0;
}

}  // namespace

double eval_expression(const Expr& e, double t, std::span<const double> x) {
    switch (e.kind()) {
        case Expr::Kind::Constant: return e.value();
        case Expr::Kind::Time: return t;
        case Expr::Kind::State: {
            int idx = e.index();
            if (static_cast<std::size_t>(idx) > x.size()) {
                throw EvalError("state variable x" + std::to_string(idx) +
                                    " out of range for state of size " + std::to_string(x.size()),
                                e.source_pos());
            }
            return x[static_cast<std::size_t>(idx) - 1];
        }
        case Expr::Kind::Unary:
            return apply_unary(e.unary_op(), eval_expression(e.child(), t, x), e.source_pos());
        case Expr::Kind::Binary:
            return apply_binary(e.binary_op(), eval_expression(e.lhs(), t, x),
                                eval_expression(e.rhs(), t, x), e.source_pos());
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

namespace {

Expr d(const Expr& e, int k) {
    using K = Expr::Kind;
    switch (e.kind()) {
        case K::Constant:
        case K::Time:
            return Expr::constant(0.0);
        case K::State:
            return Expr::constant(e.index() == k ? 1.0 : 0.0);
        case K::Unary: {
            Expr u = e.child();
            Expr du = d(u, k);
            switch (e.unary_op()) {
                case UnaryOp::Neg: return Expr::unary(UnaryOp::Neg, du);
                case UnaryOp::Exp:
                    return Expr::binary(BinaryOp::Mul, Expr::unary(UnaryOp::Exp, u), du);
                case UnaryOp::Log: return Expr::binary(BinaryOp::Div, du, u);
                case UnaryOp::Sin:
                    return Expr::binary(BinaryOp::Mul, Expr::unary(UnaryOp::Cos, u), du);
                case UnaryOp::Cos:
                    return Expr::unary(UnaryOp::Neg,
                                       Expr::binary(BinaryOp::Mul, Expr::unary(UnaryOp::Sin, u), du));
                case UnaryOp::Tan:
                    return Expr::binary(
                        BinaryOp::Div, du,
                        Expr::binary(BinaryOp::Pow, Expr::unary(UnaryOp::Cos, u), Expr::constant(2.0)));
                case UnaryOp::Sqrt:
                    return Expr::binary(BinaryOp::Div, du,
                                        Expr::binary(BinaryOp::Mul, Expr::constant(2.0),
                                                     Expr::unary(UnaryOp::Sqrt, u)));
            }
            return Expr::constant(0.0);
        }
        case K::Binary: {
            Expr a = e.lhs();
            Expr b = e.rhs();
            switch (e.binary_op()) {
                case BinaryOp::Add: return Expr::binary(BinaryOp::Add, d(a, k), d(b, k));
                case BinaryOp::Sub: return Expr::binary(BinaryOp::Sub, d(a, k), d(b, k));
                case BinaryOp::Mul:
                    return Expr::binary(BinaryOp::Add, Expr::binary(BinaryOp::Mul, d(a, k), b),
                                        Expr::binary(BinaryOp::Mul, a, d(b, k)));
                case BinaryOp::Div:
                    return Expr::binary(
                        BinaryOp::Div,
                        Expr::binary(BinaryOp::Sub, Expr::binary(BinaryOp::Mul, d(a, k), b),
                                     Expr::binary(BinaryOp::Mul, a, d(b, k))),
                        Expr::binary(BinaryOp::Pow, b, Expr::constant(2.0)));
                case BinaryOp::Pow: {
                    double c = b.value();
                    if (c == 0.0) return Expr::constant(0.0);
                    if (c == 1.0) return d(a, k);
                    return Expr::binary(
                        BinaryOp::Mul,
                        Expr::binary(BinaryOp::Mul, Expr::constant(c),
                                     Expr::binary(BinaryOp::Pow, a, Expr::constant(c - 1.0))),
                        d(a, k));
                }
            }
            return Expr::constant(0.0);
        }
    }
    return Expr::constant(0.0);
}

}  // namespace

Expr differentiate(const Expr& e, int state_index) {
    if (state_index < 1) throw std::invalid_argument("state variable index must be >= 1");
    return simplify(d(e, state_index));
}

// ---------------------------------------------------------------------------
// Simplification
// ---------------------------------------------------------------------------

namespace {

bool is_const(const Expr& e, double v) {
    return e.kind() == Expr::Kind::Constant && e.value() == v;
}

// One local rewrite at the root, or nullopt when no rule applies. Constant
// folding is skipped when the fold would hit a domain fault or produce a
// non-finite value; evaluation keeps the IEEE behaviour in those cases.
std::optional<Expr> rewrite_root(const Expr& e) {
    if (e.kind() == Expr::Kind::Unary) {
        Expr c = e.child();
        if (e.unary_op() == UnaryOp::Neg && c.kind() == Expr::Kind::Unary &&
            c.unary_op() == UnaryOp::Neg) {
            return c.child();  // -(-e)
        }
        if (c.kind() == Expr::Kind::Constant) {
            try {
                double v = apply_unary(e.unary_op(), c.value(), EvalError::npos);
                if (std::isfinite(v)) return Expr::constant(v);
            } catch (const EvalError&) {
            }
        }
        return std::nullopt;
    }
    if (e.kind() != Expr::Kind::Binary) return std::nullopt;

    Expr a = e.lhs();
    Expr b = e.rhs();
    if (a.kind() == Expr::Kind::Constant && b.kind() == Expr::Kind::Constant) {
        try {
            double v = apply_binary(e.binary_op(), a.value(), b.value(), EvalError::npos);
            if (std::isfinite(v)) return Expr::constant(v);
        } catch (const EvalError&) {
        }
    }
    switch (e.binary_op()) {
        case BinaryOp::Add:
            if (is_const(a, 0.0)) return b;
            if (is_const(b, 0.0)) return a;
            break;
        case BinaryOp::Sub:
            if (is_const(b, 0.0)) return a;
            if (is_const(a, 0.0)) return Expr::unary(UnaryOp::Neg, b);
            break;
        case BinaryOp::Mul:
            if (is_const(a, 1.0)) return b;
            if (is_const(b, 1.0)) return a;
            if (is_const(a, 0.0) || is_const(b, 0.0)) return Expr::constant(0.0);
            break;
        case BinaryOp::Div:
            if (is_const(b, 1.0)) return a;
            if (is_const(a, 0.0)) return Expr::constant(0.0);
            break;
        case BinaryOp::Pow:
            if (is_const(b, 1.0)) return a;
            if (is_const(b, 0.0)) return Expr::constant(1.0);
            break;
    }
    return std::nullopt;
}

}  // namespace

Expr simplify(const Expr& e) {
    Expr out = e;
    switch (e.kind()) {
        case Expr::Kind::Constant:
        case Expr::Kind::Time:
        case Expr::Kind::State:
            return e;
        case Expr::Kind::Unary:
            out = Expr::unary(e.unary_op(), simplify(e.child()));
            break;
        case Expr::Kind::Binary:
            out = Expr::binary(e.binary_op(), simplify(e.lhs()), simplify(e.rhs()));
            break;
    }
    while (auto r = rewrite_root(out)) out = *r;
    return out;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

std::string format_constant(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    assert(ec == std::errc());
    return std::string(buf, ptr);
}

// Precedence levels of the grammar: '+'/'-' bind loosest, then '*'/'/',
// then '^', with unary minus and atoms inside 'base'. Note that '-' base
// binds tighter than '^': "-x^2" parses as (-x)^2.
enum Level { LvlAddSub = 1, LvlMulDiv = 2, LvlPow = 3, LvlBase = 4 };

int level_of(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Binary:
            switch (e.binary_op()) {
                case BinaryOp::Add:
                case BinaryOp::Sub: return LvlAddSub;
                case BinaryOp::Mul:
                case BinaryOp::Div: return LvlMulDiv;
                case BinaryOp::Pow: return LvlPow;
            }
            return LvlAddSub;
        default:
            return LvlBase;  // atoms, functions, unary minus chains
    }
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, int min_level, std::string& out) {
    if (level_of(e) < min_level) {
        out += '(';
        print(e, out);
        out += ')';
    } else {
        print(e, out);
    }
}

void print(const Expr& e, std::string& out) {
    switch (e.kind()) {
        case Expr::Kind::Constant:
            out += format_constant(e.value());
            return;
        case Expr::Kind::Time:
            out += 't';
            return;
        case Expr::Kind::State:
            out += 'x';
            out += std::to_string(e.index());
            return;
        case Expr::Kind::Unary: {
            static constexpr std::string_view names[] = {"-", "exp", "log", "sin",
                                                         "cos", "tan", "sqrt"};
            if (e.unary_op() == UnaryOp::Neg) {
                out += '-';
                print_wrapped(e.child(), LvlBase, out);
            } else {
                out += names[static_cast<int>(e.unary_op())];
                out += '(';
                print(e.child(), out);
                out += ')';
            }
            return;
        }
        case Expr::Kind::Binary: {
            int lvl = level_of(e);
            if (e.binary_op() == BinaryOp::Pow) {
                // lhs must be printable as a 'base'; rhs is a numeric literal.
                print_wrapped(e.lhs(), LvlBase, out);
                out += '^';
                out += format_constant(e.rhs().value());
                return;
            }
            static constexpr char ops[] = {'+', '-', '*', '/'};
            print_wrapped(e.lhs(), lvl, out);
            out += ops[static_cast<int>(e.binary_op())];
            // Right operand at the same level reassociates when reparsed, so
            // it needs parentheses even for commutative operators.
            print_wrapped(e.rhs(), lvl + 1, out);
            return;
        }
    }
}

}  // namespace

std::string to_string(const Expr& e) {
    std::string out;
    print(e, out);
    return out;
}

int max_state_index(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Constant:
        case Expr::Kind::Time:
            return 0;
        case Expr::Kind::State:
            return e.index();
        case Expr::Kind::Unary:
            return max_state_index(e.child());
        case Expr::Kind::Binary:
            return std::max(max_state_index(e.lhs()), max_state_index(e.rhs()));
    }
    return 0;
}

}  // namespace vim
