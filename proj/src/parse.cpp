// Recursive-descent reader for scalar expressions.
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ('-'|'+') factor | power
//   power  := base ('^' ['-'] integer)?
//   base   := number | ident | '(' expr ')' | 'exp' '(' expr ')'
//
// Unary minus sits below '^', so "-x^2" means -(x^2); the printer relies on it.

#include "twistjac/expr.hpp"

#include <cctype>
#include <climits>

namespace twistjac {

namespace {

class Parser {
public:
    Parser(std::string_view text, const Chart& chart) : text_(text), chart_(chart), n_(chart.dim()) {}

    Expr parse()
    {
        Expr e = expr();
        skip_ws();
        if (pos_ != text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    Expr expr()
    {
        Expr acc = term();
        while (true) {
            if (accept('+'))
                acc += term();
            else if (accept('-'))
                acc -= term();
            else
                return acc;
        }
    }

    Expr term()
    {
        Expr acc = factor();
        while (true) {
            if (accept('*')) {
                acc *= factor();
            } else if (accept('/')) {
                std::size_t at = pos_;
                Expr d = factor();
                if (d.is_zero()) throw ParseError("division by zero", at);
                acc /= d;
            } else {
                return acc;
            }
        }
    }

    Expr factor()
    {
        if (accept('-')) return -factor();
        if (accept('+')) return factor();
        return power();
    }

    Expr power()
    {
        Expr b = base();
        if (!accept('^')) return b;
        bool neg = accept('-');
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) fail("expected integer exponent");
        long k = 0;
        for (std::size_t i = start; i < pos_; ++i) {
            k = k * 10 + (text_[i] - '0');
            if (k > 10000) throw ParseError("exponent too large", start);
        }
        if (neg && b.is_zero()) throw ParseError("zero raised to a negative power", start);
        return b.pow(static_cast<int>(neg ? -k : k));
    }

    Expr base()
    {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Expr::constant(n_, number());
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string_view id = text_.substr(start, pos_ - start);
            if (id == "exp") {
                expect('(');
                std::size_t at = pos_;
                Expr arg = expr();
                expect(')');
                try {
                    return Expr::exp(arg);
                } catch (const std::domain_error& e) {
                    throw ParseError(e.what(), at);
                }
            }
            auto idx = chart_.index_of(id);
            if (!idx) throw ParseError("unknown identifier '" + std::string(id) + "'", start);
            return Expr::variable(n_, *idx);
        }
        fail(std::string("unexpected '") + c + "'");
    }

    Rational number()
    {
        std::size_t start = pos_;
        std::string digits;
        int frac = 0;
        bool dot = false;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                digits += c;
                if (dot) ++frac;
            } else if (c == '.' && !dot) {
                dot = true;
            } else {
                break;
            }
            ++pos_;
        }
        if (digits.empty()) throw ParseError("malformed number", start);
        Rational q{mpz_class(digits, 10)};
        if (frac > 0) {
            mpz_class den;
            mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(frac));
            q /= Rational(den);
            q.canonicalize();
        }
        return q;
    }

    std::string_view text_;
    const Chart& chart_;
    int n_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, const Chart& chart)
{
    return Parser(text, chart).parse();
}

Rational parse_rational(std::string_view text)
{
    static const Chart empty("const", {"_"});
    Expr e = parse_expr(text, empty);
    auto c = e.as_constant();
    if (!c) throw ParseError("expected a rational constant", 0);
    return *c;
}

}  // namespace twistjac
