#include "hlcf/parse.hpp"

#include <cctype>
#include <string>

#include "hlcf/errors.hpp"

namespace hlcf {

namespace {

class Parser {
public:
    Parser(const Tower& tw, std::string_view src, int level)
        : tw_(tw), src_(src), level_(level) {}

    Elem run() {
        Elem e = expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("parse error at position " + std::to_string(pos_) + ": " + msg, pos_);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Elem expr() {
        Elem acc = term();
        while (true) {
            if (accept('+'))
                acc = acc + term();
            else if (accept('-'))
                acc = acc - term();
            else
                return acc;
        }
    }

    Elem term() {
        Elem acc = unary();
        while (true) {
            if (accept('*')) {
                acc = acc * unary();
            } else if (accept('/')) {
                const std::size_t at = pos_;
                Elem d = unary();
                if (d.is_exact_zero()) {
                    pos_ = at;
                    throw DomainError("division by zero at position " + std::to_string(at));
                }
                acc = acc / d;
            } else {
                return acc;
            }
        }
    }

    Elem unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    long long signed_int() {
        skip_ws();
        bool neg = false;
        bool paren = accept('(');
        if (accept('-')) neg = true;
        else accept('+');
        skip_ws();
        if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
            fail("expected integer exponent");
        long long v = 0;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            v = v * 10 + (src_[pos_++] - '0');
            if (v > 1000000) fail("exponent too large");
        }
        if (paren && !accept(')')) fail("expected ')'");
        return neg ? -v : v;
    }

    Elem power() {
        Elem base = atom();
        if (accept('^')) {
            const long long e = signed_int();
            if (e < 0 && base.is_exact_zero()) throw DomainError("division by zero");
            return base.pow(e);
        }
        return base;
    }

    Elem atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of expression");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Elem e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            long long v = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                v = (v * 10 + (src_[pos_++] - '0')) % 1000003;
            }
            return Elem::from_int(tw_, level_, v);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            const std::string name(src_.substr(start, pos_ - start));
            if (name == tw_.config().gen_name)
                return Elem::constant(tw_, level_, tw_.field().gen());
            for (int k = 1; k <= tw_.d(); ++k) {
                if (tw_.var(k) == name) {
                    if (k > level_) {
                        pos_ = start;
                        fail("variable '" + name + "' is not in the field at this level");
                    }
                    return Elem::var(tw_, level_, k);
                }
            }
            pos_ = start;
            fail("unknown identifier '" + name + "'");
        }
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    const Tower& tw_;
    std::string_view src_;
    int level_;
    std::size_t pos_ = 0;
};

}  // namespace

Elem parse_elem(const Tower& tw, std::string_view expr, int level) {
    if (level < 0) level = tw.d();
    if (level > tw.d()) throw DomainError("level exceeds the tower dimension");
    return Parser(tw, expr, level).run();
}

std::vector<std::string> split_symbol(std::string_view text) {
    std::size_t a = text.find_first_not_of(" \t");
    std::size_t b = text.find_last_not_of(" \t");
    if (a == std::string_view::npos || text[a] != '{' || text[b] != '}')
        throw ParseError("symbol must be written as {e1, ..., en}", a == std::string_view::npos ? 0 : a);
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (std::size_t i = a + 1; i < b; ++i) {
        const char c = text[i];
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    for (auto& s : out) {
        const auto l = s.find_first_not_of(" \t");
        if (l == std::string::npos) throw ParseError("empty symbol entry", a);
        s = s.substr(l, s.find_last_not_of(" \t") - l + 1);
    }
    return out;
}

}  // namespace hlcf
