#include <cctype>
#include <cstdlib>
#include <string>

#include "ephs/expr.hpp"

namespace ephs {

namespace {

// Recursive-descent parser for the infix expression syntax:
//   expr  := term (('+' | '-') term)*
//   term  := unary (('*' | '/') unary)*
//   unary := '-' unary | power
//   power := atom ('^' ['-'] digits)?
//   atom  := number | symbol | '(' expr ')' | 'exp' '(' expr ')' | 'log' '(' expr ')'
// Symbols are dotted names; the first segment starts with a letter or '_'.
class ExprParser {
public:
    explicit ExprParser(std::string_view text) : text_(text) {}

    Expr parse()
    {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& message) const
    {
        throw Error("expression: " + message + " at offset " + std::to_string(pos_) +
                    " in '" + std::string(text_) + "'");
    }

    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool eat(char c)
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek()
    {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    Expr parse_expr()
    {
        Expr e = parse_term();
        while (true) {
            if (eat('+'))
                e = e + parse_term();
            else if (eat('-'))
                e = e - parse_term();
            else
                return e;
        }
    }

    Expr parse_term()
    {
        Expr e = parse_unary();
        while (true) {
            if (eat('*'))
                e = e * parse_unary();
            else if (eat('/'))
                e = e / parse_unary();
            else
                return e;
        }
    }

    Expr parse_unary()
    {
        if (eat('-'))
            return -parse_unary();
        return parse_power();
    }

    Expr parse_power()
    {
        Expr base = parse_atom();
        if (eat('^')) {
            skip_ws();
            bool negative = eat('-');
            skip_ws();
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            if (pos_ == start)
                fail("expected integer exponent");
            int e = std::atoi(std::string(text_.substr(start, pos_ - start)).c_str());
            return base.pow(negative ? -e : e);
        }
        return base;
    }

    Expr parse_atom()
    {
        skip_ws();
        if (pos_ >= text_.size())
            fail("unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_expr();
            if (!eat(')'))
                fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)))
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return parse_symbol_or_call();
        fail(std::string("unexpected character '") + c + "'");
    }

    Expr parse_number()
    {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.' && pos_ + 1 < text_.size() &&
            std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
                ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark; // 'e' belongs to a following symbol, not an exponent
            }
        }
        return Expr::constant(std::strtod(std::string(text_.substr(start, pos_ - start)).c_str(), nullptr));
    }

    Expr parse_symbol_or_call()
    {
        std::size_t start = pos_;
        auto segment_char = [&](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
        };
        while (pos_ < text_.size() && segment_char(text_[pos_]))
            ++pos_;
        std::string head(text_.substr(start, pos_ - start));
        if (head == "exp" || head == "log") {
            if (eat('(')) {
                Expr arg = parse_expr();
                if (!eat(')'))
                    fail("expected ')'");
                return head == "exp" ? Expr::exp(arg) : Expr::log(arg);
            }
        }
        std::string symbol = head;
        while (pos_ < text_.size() && text_[pos_] == '.') {
            std::size_t mark = pos_;
            ++pos_;
            std::size_t seg_start = pos_;
            while (pos_ < text_.size() && segment_char(text_[pos_]))
                ++pos_;
            if (pos_ == seg_start) {
                pos_ = mark;
                break;
            }
            symbol += '.';
            symbol += text_.substr(seg_start, pos_ - seg_start);
        }
        return Expr::var(std::move(symbol));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace

Expr Expr::parse(std::string_view text)
{
    return ExprParser(text).parse();
}

} // namespace ephs
