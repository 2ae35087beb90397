#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "geoharm/core.hpp"

namespace geoharm {

/// First-order dual number; carries d/dt through a profile expression so the
/// evaluated derivative is the exact derivative of the evaluated function.
struct Dual {
    double v = 0.0;
    double d = 0.0;

    friend Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
    friend Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
    friend Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
    friend Dual operator/(Dual a, Dual b) {
        double q = a.v / b.v;
        return {q, (a.d - q * b.d) / b.v};
    }
};

/// Radial profile expressions in the variable t:
///
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := atom ('^' factor)?          -- right-associative
///   atom   := number | 't' | '(' expr ')' | func '(' expr ')'
///   func   := 'exp' | 'log' | 'sqrt'
///
/// The exponent of '^' must evaluate to a constant; it is folded at parse
/// time. Every admitted primitive is smooth on its domain, so a parsed
/// profile is C^inf wherever it evaluates.
class Expression {
public:
    static Expression parse(std::string_view source) {
        Parser p{source, 0};
        Expression e;
        e.source_.assign(source);
        e.root_ = p.parse_expr(e.nodes_);
        p.skip_ws();
        if (p.pos != source.size())
            throw ParseError(p.pos, "unexpected trailing input");
        return e;
    }

    double eval(double t) const { return eval_node<double>(root_, t); }

    /// (value, d/dt) in one pass.
    Dual eval_dual(double t) const { return eval_node<Dual>(root_, Dual{t, 1.0}); }

    const std::string& source() const { return source_; }

private:
    enum class Op : std::uint8_t { Const, Var, Add, Sub, Mul, Div, Pow, Exp, Log, Sqrt };

    struct Node {
        Op op;
        double value = 0.0;  // Const payload, or folded exponent for Pow
        int a = -1;
        int b = -1;
    };

    std::vector<Node> nodes_;
    int root_ = -1;
    std::string source_;

    // ── evaluation ─────────────────────────────────────────────────────────

    static double vpart(double x) { return x; }
    static double vpart(const Dual& x) { return x.v; }

    template <class T>
    T eval_node(int idx, T t) const {
        const Node& n = nodes_[static_cast<std::size_t>(idx)];
        switch (n.op) {
            case Op::Const: return constant<T>(n.value);
            case Op::Var: return t;
            case Op::Add: return eval_node(n.a, t) + eval_node(n.b, t);
            case Op::Sub: return eval_node(n.a, t) - eval_node(n.b, t);
            case Op::Mul: return eval_node(n.a, t) * eval_node(n.b, t);
            case Op::Div: {
                T num = eval_node(n.a, t);
                T den = eval_node(n.b, t);
                if (vpart(den) == 0.0)
                    throw DomainError("profile: division by zero at t = " + fmt17(vpart(t)));
                return num / den;
            }
            case Op::Pow: return pow_const(eval_node(n.a, t), n.value, vpart(t));
            case Op::Exp: return exp_fn(eval_node(n.a, t));
            case Op::Log: return log_fn(eval_node(n.a, t), vpart(t));
            case Op::Sqrt: return sqrt_fn(eval_node(n.a, t), vpart(t));
        }
        throw Error("profile: corrupt expression tree");
    }

    template <class T>
    static T constant(double c);

    static double pow_const(double base, double c, double t) {
        if (base < 0.0 && c != std::floor(c))
            throw DomainError("profile: negative base under fractional power at t = " + fmt17(t));
        if (base == 0.0 && c < 0.0)
            throw DomainError("profile: zero base under negative power at t = " + fmt17(t));
        return std::pow(base, c);
    }
    static Dual pow_const(Dual base, double c, double t) {
        double v = pow_const(base.v, c, t);
        // d(base^c) = c * base^(c-1) * base'
        double d = (c == 0.0) ? 0.0 : c * std::pow(base.v, c - 1.0) * base.d;
        return {v, d};
    }

    static double exp_fn(double x) { return std::exp(x); }
    static Dual exp_fn(Dual x) {
        double e = std::exp(x.v);
        return {e, e * x.d};
    }

    static double log_fn(double x, double t) {
        if (x <= 0.0) throw DomainError("profile: log of non-positive value at t = " + fmt17(t));
        return std::log(x);
    }
    static Dual log_fn(Dual x, double t) { return {log_fn(x.v, t), x.d / x.v}; }

    static double sqrt_fn(double x, double t) {
        if (x < 0.0) throw DomainError("profile: sqrt of negative value at t = " + fmt17(t));
        return std::sqrt(x);
    }
    static Dual sqrt_fn(Dual x, double t) {
        double s = sqrt_fn(x.v, t);
        if (s == 0.0) throw DomainError("profile: sqrt derivative pole at t = " + fmt17(t));
        return {s, x.d / (2.0 * s)};
    }

    // ── recursive-descent parser ───────────────────────────────────────────

    struct Parser {
        std::string_view src;
        std::size_t pos;

        void skip_ws() {
            while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t')) ++pos;
        }
        char peek() {
            skip_ws();
            return pos < src.size() ? src[pos] : '\0';
        }

        int parse_expr(std::vector<Node>& nodes) {
            int lhs = parse_term(nodes);
            for (;;) {
                char c = peek();
                if (c != '+' && c != '-') return lhs;
                ++pos;
                int rhs = parse_term(nodes);
                nodes.push_back({c == '+' ? Op::Add : Op::Sub, 0.0, lhs, rhs});
                lhs = static_cast<int>(nodes.size()) - 1;
            }
        }

        int parse_term(std::vector<Node>& nodes) {
            int lhs = parse_factor(nodes);
            for (;;) {
                char c = peek();
                if (c != '*' && c != '/') return lhs;
                ++pos;
                int rhs = parse_factor(nodes);
                nodes.push_back({c == '*' ? Op::Mul : Op::Div, 0.0, lhs, rhs});
                lhs = static_cast<int>(nodes.size()) - 1;
            }
        }

        int parse_factor(std::vector<Node>& nodes) {
            int base = parse_atom(nodes);
            if (peek() != '^') return base;
            std::size_t caret = pos;
            ++pos;
            std::size_t mark = nodes.size();
            int expo = parse_factor(nodes);
            if (subtree_has_var(nodes, expo))
                throw ParseError(caret, "exponent must evaluate to a constant");
            double c = fold_constant(nodes, expo);
            nodes.resize(mark);  // exponent subtree was appended last; discard it
            nodes.push_back({Op::Pow, c, base, -1});
            return static_cast<int>(nodes.size()) - 1;
        }

        int parse_atom(std::vector<Node>& nodes) {
            char c = peek();
            if (c == '\0') throw ParseError(pos, "expected expression");
            if (c == '(') {
                ++pos;
                int inner = parse_expr(nodes);
                expect(')');
                return inner;
            }
            if (c == 't' && !is_ident_char(look(1))) {
                ++pos;
                nodes.push_back({Op::Var, 0.0, -1, -1});
                return static_cast<int>(nodes.size()) - 1;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number(nodes);
            if (std::isalpha(static_cast<unsigned char>(c))) return parse_call(nodes);
            throw ParseError(pos, std::string("unexpected character '") + c + "'");
        }

        int parse_number(std::vector<Node>& nodes) {
            skip_ws();
            double value = 0.0;
            const char* begin = src.data() + pos;
            const char* end = src.data() + src.size();
            auto [ptr, ec] = std::from_chars(begin, end, value);
            if (ec != std::errc())
                throw ParseError(pos, "malformed number literal");
            pos = static_cast<std::size_t>(ptr - src.data());
            nodes.push_back({Op::Const, value, -1, -1});
            return static_cast<int>(nodes.size()) - 1;
        }

        int parse_call(std::vector<Node>& nodes) {
            skip_ws();
            std::size_t start = pos;
            while (pos < src.size() && is_ident_char(src[pos])) ++pos;
            std::string_view name = src.substr(start, pos - start);
            Op op;
            if (name == "exp")
                op = Op::Exp;
            else if (name == "log")
                op = Op::Log;
            else if (name == "sqrt")
                op = Op::Sqrt;
            else
                throw ParseError(start, "unknown identifier '" + std::string(name) + "'");
            expect('(');
            int arg = parse_expr(nodes);
            if (peek() == ',')
                throw ParseError(pos, "'" + std::string(name) + "' takes exactly one argument");
            expect(')');
            nodes.push_back({op, 0.0, arg, -1});
            return static_cast<int>(nodes.size()) - 1;
        }

        char look(std::size_t ahead) const {
            return pos + ahead < src.size() ? src[pos + ahead] : '\0';
        }
        static bool is_ident_char(char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
        }
        void expect(char c) {
            if (peek() != c)
                throw ParseError(pos, std::string("expected '") + c + "'");
            ++pos;
        }

        static bool subtree_has_var(const std::vector<Node>& nodes, int idx) {
            const Node& n = nodes[static_cast<std::size_t>(idx)];
            if (n.op == Op::Var) return true;
            if (n.a >= 0 && subtree_has_var(nodes, n.a)) return true;
            if (n.b >= 0 && subtree_has_var(nodes, n.b)) return true;
            return false;
        }

        static double fold_constant(std::vector<Node>& nodes, int idx) {
            Expression tmp;
            tmp.nodes_ = nodes;  // evaluation only walks the subtree under idx
            tmp.root_ = idx;
            return tmp.eval(0.0);
        }
    };
};

template <>
inline double Expression::constant<double>(double c) {
    return c;
}
template <>
inline Dual Expression::constant<Dual>(double c) {
    return Dual{c, 0.0};
}

}  // namespace geoharm
