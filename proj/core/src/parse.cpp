#include "qintcart/parse.hpp"

#include <cctype>
#include <charconv>

namespace qintcart {

namespace {

enum class Tok : uint8_t {
    number_int, number_float, ident, plus, minus, star, slash, caret,
    lparen, rparen, comma, underscore, prime, end
};

struct Token {
    Tok kind;
    size_t pos;
    std::string_view text;
    long long ival = 0;
    double dval = 0.0;
};

class Lexer {
public:
    explicit Lexer(std::string_view s) : s_(s) { scan(); }

    std::vector<Token> take() { return std::move(toks_); }

private:
    void scan() {
        size_t i = 0;
        while (i < s_.size()) {
            char c = s_[i];
            if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
            size_t start = i;
            if (std::isdigit(static_cast<unsigned char>(c))) {
                bool is_float = false;
                while (i < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i]))) ++i;
                if (i < s_.size() && s_[i] == '.') {
                    is_float = true;
                    ++i;
                    while (i < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i]))) ++i;
                }
                if (i < s_.size() && (s_[i] == 'e' || s_[i] == 'E')) {
                    size_t j = i + 1;
                    if (j < s_.size() && (s_[j] == '+' || s_[j] == '-')) ++j;
                    if (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) {
                        is_float = true;
                        i = j;
                        while (i < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i]))) ++i;
                    }
                }
                Token t{is_float ? Tok::number_float : Tok::number_int, start, s_.substr(start, i - start)};
                if (is_float) {
                    auto r = std::from_chars(s_.data() + start, s_.data() + i, t.dval);
                    if (r.ec != std::errc()) throw parse_error("malformed number", start);
                } else {
                    auto r = std::from_chars(s_.data() + start, s_.data() + i, t.ival);
                    if (r.ec != std::errc()) throw parse_error("integer literal out of range", start);
                }
                toks_.push_back(t);
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c))) {
                while (i < s_.size() && std::isalnum(static_cast<unsigned char>(s_[i]))) ++i;
                toks_.push_back({Tok::ident, start, s_.substr(start, i - start)});
                continue;
            }
            Tok k;
            switch (c) {
                case '+': k = Tok::plus; break;
                case '-': k = Tok::minus; break;
                case '*': k = Tok::star; break;
                case '/': k = Tok::slash; break;
                case '^': k = Tok::caret; break;
                case '(': k = Tok::lparen; break;
                case ')': k = Tok::rparen; break;
                case ',': k = Tok::comma; break;
                case '_': k = Tok::underscore; break;
                case '\'': k = Tok::prime; break;
                default: throw parse_error(std::string("unexpected character '") + c + "'", i);
            }
            toks_.push_back({k, i, s_.substr(i, 1)});
            ++i;
        }
        toks_.push_back({Tok::end, s_.size(), {}});
    }

    std::string_view s_;
    std::vector<Token> toks_;
};

class Parser {
public:
    explicit Parser(std::string_view s) : toks_(Lexer(s).take()) {}

    Expr run() {
        Expr e = parse_sum();
        expect(Tok::end, "trailing input");
        return e;
    }

private:
    const Token& peek(size_t ahead = 0) const {
        size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    const Token& advance() { return toks_[pos_++]; }
    bool accept(Tok k) {
        if (peek().kind == k) { ++pos_; return true; }
        return false;
    }
    void expect(Tok k, const char* what) {
        if (!accept(k)) throw parse_error(std::string("expected ") + what, peek().pos);
    }

    Expr parse_sum() {
        Expr e = parse_product();
        for (;;) {
            if (accept(Tok::plus)) e = e + parse_product();
            else if (accept(Tok::minus)) e = e - parse_product();
            else return e;
        }
    }

    Expr parse_product() {
        Expr e = parse_unary();
        for (;;) {
            if (accept(Tok::star)) e = e * parse_unary();
            else if (accept(Tok::slash)) e = e / parse_unary();
            else return e;
        }
    }

    Expr parse_unary() {
        if (accept(Tok::minus)) return -parse_unary();
        if (accept(Tok::plus)) return parse_unary();
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_primary();
        while (peek().kind == Tok::caret) {
            ++pos_;
            base = Expr::pow(base, parse_exponent());
        }
        return base;
    }

    long long parse_exponent() {
        if (peek().kind == Tok::number_int) return advance().ival;
        if (accept(Tok::lparen)) {
            bool neg = accept(Tok::minus);
            if (peek().kind != Tok::number_int) throw parse_error("expected integer exponent", peek().pos);
            long long v = advance().ival;
            expect(Tok::rparen, "')'");
            return neg ? -v : v;
        }
        throw parse_error("expected integer exponent", peek().pos);
    }

    Expr parse_primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::number_int: ++pos_; return Expr::integer(t.ival);
            case Tok::number_float: ++pos_; return Expr::real(t.dval);
            case Tok::lparen: {
                ++pos_;
                Expr e = parse_sum();
                expect(Tok::rparen, "')'");
                return e;
            }
            case Tok::ident: return parse_identifier();
            default: throw parse_error("expected expression", t.pos);
        }
    }

    std::optional<Axis> axis_of(std::string_view s) const {
        if (s == "x") return Axis::x;
        if (s == "y") return Axis::y;
        if (s == "z") return Axis::z;
        return std::nullopt;
    }

    Expr parse_identifier() {
        const Token& name_tok = advance();
        std::string name(name_tok.text);

        // derivative suffixes
        int primes = 0;
        while (accept(Tok::prime)) ++primes;
        bool caret_order = false;
        long long caret_n = 0;
        if (primes == 0 && peek().kind == Tok::caret && peek(1).kind == Tok::lparen &&
            peek(2).kind == Tok::number_int && peek(3).kind == Tok::rparen &&
            peek(4).kind == Tok::lparen) {
            caret_order = true;
            caret_n = peek(2).ival;
            pos_ += 4;
        }
        std::array<uint8_t, 3> partial{0, 0, 0};
        bool has_partial = false;
        if (primes == 0 && !caret_order && peek().kind == Tok::underscore &&
            peek(1).kind == Tok::ident && peek(2).kind == Tok::lparen) {
            std::string_view letters = peek(1).text;
            std::array<uint8_t, 3> acc{0, 0, 0};
            bool ok = true;
            for (char c : letters) {
                if (c == 'x') ++acc[0];
                else if (c == 'y') ++acc[1];
                else if (c == 'z') ++acc[2];
                else { ok = false; break; }
            }
            if (ok) {
                has_partial = true;
                partial = acc;
                pos_ += 2;
            }
        }
        bool has_suffix = primes > 0 || caret_order || has_partial;

        if (peek().kind != Tok::lparen) {
            if (has_suffix) throw parse_error("derivative suffix requires an argument list", peek().pos);
            if (auto a = axis_of(name)) return Expr::var(*a);
            if (name == "i") return Expr::imaginary();
            if (name == "hbar") return Expr::hbar();
            if (builtin_from_name(name))
                throw parse_error("builtin '" + name + "' requires an argument", name_tok.pos);
            return Expr::param(std::move(name));
        }

        // an application follows
        if (auto b = builtin_from_name(name)) {
            if (has_suffix)
                throw parse_error("derivative suffix on builtin '" + name + "'", name_tok.pos);
            expect(Tok::lparen, "'('");
            Expr arg = parse_sum();
            expect(Tok::rparen, "')'");
            return Expr::apply(*b, std::move(arg));
        }
        if (axis_of(name) || name == "i" || name == "hbar")
            throw parse_error("'" + name + "' is not callable", name_tok.pos);

        expect(Tok::lparen, "'('");
        uint8_t deps = 0;
        Axis last = Axis::x;
        int nargs = 0;
        for (;;) {
            const Token& a = peek();
            if (a.kind != Tok::ident) throw parse_error("expected variable name", a.pos);
            auto ax = axis_of(a.text);
            if (!ax) throw parse_error("unknown builtin or non-variable argument to '" + name + "'",
                                       a.pos);
            uint8_t bit = axis_bit(*ax);
            if (deps & bit) throw parse_error("duplicate argument variable", a.pos);
            if (nargs > 0 && *ax <= last) throw parse_error("argument variables must be in x,y,z order", a.pos);
            deps |= bit;
            last = *ax;
            ++nargs;
            ++pos_;
            if (accept(Tok::comma)) continue;
            break;
        }
        expect(Tok::rparen, "')'");

        std::array<uint8_t, 3> ord{0, 0, 0};
        if (primes > 0 || caret_order) {
            if (nargs != 1)
                throw parse_error("prime derivative on a multivariate function", name_tok.pos);
            int n = primes > 0 ? primes : static_cast<int>(caret_n);
            if (n < 0 || n > 200) throw parse_error("derivative order out of range", name_tok.pos);
            ord[static_cast<int>(last)] = static_cast<uint8_t>(n);
        } else if (has_partial) {
            ord = partial;
            for (Axis a : kAxes)
                if (ord[static_cast<int>(a)] > 0 && !(deps & axis_bit(a)))
                    throw parse_error("partial derivative in a non-argument variable", name_tok.pos);
        }
        return Expr::fn(std::move(name), deps, ord);
    }

    std::vector<Token> toks_;
    size_t pos_ = 0;
};

} // namespace

Expr parse(std::string_view text) { return Parser(text).run(); }

} // namespace qintcart
