#include "qintcart/expr.hpp"

#include <charconv>
#include <cmath>

namespace qintcart {

namespace {

// Shortest round-trip representation; always visibly floating point so the
// parser rebuilds an approximate constant.
std::string double_str(double d) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), d);
    std::string s(buf, p);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
        s += ".0";
    return s;
}

enum Prec { kAdd = 0, kMul = 1, kUnary = 2, kPow = 3, kAtom = 4 };

void print_rec(const Expr& e, std::string& out, int parent_prec);

void print_fn(const Expr& e, std::string& out) {
    out += e.name();
    int axes = 0;
    for (Axis a : kAxes)
        if (e.fn_deps() & axis_bit(a)) ++axes;
    int total = e.fn_total_order();
    if (axes == 1) {
        if (total >= 1 && total <= 3)
            out.append(static_cast<size_t>(total), '\'');
        else if (total > 3) {
            out += "^(" + std::to_string(total) + ")";
        }
    } else if (total > 0) {
        out += '_';
        for (Axis a : kAxes)
            out.append(e.fn_order()[static_cast<int>(a)], axis_name(a));
    }
    out += '(';
    bool first = true;
    for (Axis a : kAxes) {
        if (!(e.fn_deps() & axis_bit(a))) continue;
        if (!first) out += ',';
        out += axis_name(a);
        first = false;
    }
    out += ')';
}

// Prints a term with its sign split off so Add can join with " - ".
bool print_signed(const Expr& t, std::string& out, int parent_prec) {
    if (t.kind() == Kind::constant && t.number_value().negative()) {
        print_rec(Expr::number(t.number_value().neg()), out, parent_prec);
        return true;
    }
    if (t.kind() == Kind::mul) {
        const auto& kids = t.children();
        if (kids[0].kind() == Kind::constant && kids[0].number_value().negative()) {
            std::vector<Expr> pos(kids.begin(), kids.end());
            pos[0] = Expr::number(kids[0].number_value().neg());
            print_rec(Expr::mul(std::move(pos)), out, parent_prec);
            return true;
        }
    }
    print_rec(t, out, parent_prec);
    return false;
}

void print_rec(const Expr& e, std::string& out, int parent_prec) {
    switch (e.kind()) {
        case Kind::constant: {
            const Number& n = e.number_value();
            bool neg = n.negative();
            bool frac = n.is_exact() && !n.rational().is_integer();
            int prec = neg ? kUnary : (frac ? kMul : kAtom);
            bool parens = prec < parent_prec;
            if (parens) out += '(';
            out += n.str();
            if (parens) out += ')';
            return;
        }
        case Kind::imaginary: out += 'i'; return;
        case Kind::hbar: out += "hbar"; return;
        case Kind::param: out += e.name(); return;
        case Kind::var: out += axis_name(e.axis()); return;
        case Kind::fn: print_fn(e, out); return;
        case Kind::apply:
            out += builtin_name(e.builtin());
            out += '(';
            print_rec(e.children()[0], out, kAdd);
            out += ')';
            return;
        case Kind::pow: {
            bool parens = kPow < parent_prec;
            if (parens) out += '(';
            print_rec(e.children()[0], out, kAtom);
            out += '^';
            if (e.exponent() < 0)
                out += "(" + std::to_string(e.exponent()) + ")";
            else
                out += std::to_string(e.exponent());
            if (parens) out += ')';
            return;
        }
        case Kind::add: {
            bool parens = kAdd < parent_prec;
            if (parens) out += '(';
            bool first = true;
            for (const Expr& t : e.children()) {
                std::string piece;
                bool neg = print_signed(t, piece, kAdd + 1);
                if (first) {
                    if (neg) out += '-';
                } else {
                    out += neg ? " - " : " + ";
                }
                out += piece;
                first = false;
            }
            if (parens) out += ')';
            return;
        }
        case Kind::mul: {
            bool parens = kMul < parent_prec;
            if (parens) out += '(';
            const auto& kids = e.children();
            size_t start = 0;
            bool first = true;
            if (kids[0].kind() == Kind::constant) {
                // a leading coefficient never needs parens: "-3/2*x" and
                // "3/2*x" reparse to the same canonical tree
                const Number& c = kids[0].number_value();
                if (c.is_minus_one()) {
                    out += '-';
                } else {
                    out += c.str();
                    first = false;
                }
                start = 1;
            }
            for (size_t idx = start; idx < kids.size(); ++idx) {
                if (!first) out += '*';
                print_rec(kids[idx], out, kMul + 1);
                first = false;
            }
            if (parens) out += ')';
            return;
        }
    }
}

} // namespace

std::string Number::str() const {
    if (is_exact()) return rational().str();
    return double_str(value());
}

std::string to_string(const Expr& e) {
    std::string out;
    print_rec(e, out, kAdd);
    return out;
}

// ---- LaTeX (best-effort, for the determining-system dump) ----------------------

namespace {

void latex_rec(const Expr& e, std::string& out, int parent_prec);

std::string latex_symbol(const std::string& name) {
    // C1 -> C_{1}; a12 -> a_{12}
    size_t d = name.find_first_of("0123456789");
    if (d == std::string::npos || d == 0) return name;
    return name.substr(0, d) + "_{" + name.substr(d) + "}";
}

void latex_fn(const Expr& e, std::string& out) {
    int axes = 0;
    for (Axis a : kAxes)
        if (e.fn_deps() & axis_bit(a)) ++axes;
    int total = e.fn_total_order();
    std::string base = latex_symbol(e.name());
    if (axes == 1) {
        out += base;
        if (total >= 1 && total <= 3) out.append(static_cast<size_t>(total), '\'');
        else if (total > 3) out += "^{(" + std::to_string(total) + ")}";
    } else if (total > 0) {
        // single grouped symbol so the derivative subscript stays valid LaTeX
        out += "{" + base + "}_{";
        for (Axis a : kAxes)
            out.append(e.fn_order()[static_cast<int>(a)], axis_name(a));
        out += "}";
    } else {
        out += base;
    }
    out += '(';
    bool first = true;
    for (Axis a : kAxes) {
        if (!(e.fn_deps() & axis_bit(a))) continue;
        if (!first) out += ',';
        out += axis_name(a);
        first = false;
    }
    out += ')';
}

void latex_rec(const Expr& e, std::string& out, int parent_prec) {
    switch (e.kind()) {
        case Kind::constant: {
            const Number& n = e.number_value();
            bool parens = (n.negative() ? kUnary : kAtom) < parent_prec;
            if (parens) out += "\\left(";
            if (n.is_exact() && !n.rational().is_integer()) {
                const Rational& q = n.rational();
                if (q.num < 0) out += '-';
                out += "\\tfrac{" + std::to_string(q.num < 0 ? -q.num : q.num) + "}{" +
                       std::to_string(q.den) + "}";
            } else {
                out += n.str();
            }
            if (parens) out += "\\right)";
            return;
        }
        case Kind::imaginary: out += "\\mathrm{i}"; return;
        case Kind::hbar: out += "\\hbar"; return;
        case Kind::param: out += latex_symbol(e.name()); return;
        case Kind::var: out += axis_name(e.axis()); return;
        case Kind::fn: latex_fn(e, out); return;
        case Kind::apply:
            out += "\\";
            out += builtin_name(e.builtin());
            out += "\\left(";
            latex_rec(e.children()[0], out, kAdd);
            out += "\\right)";
            return;
        case Kind::pow:
            latex_rec(e.children()[0], out, kAtom);
            out += "^{" + std::to_string(e.exponent()) + "}";
            return;
        case Kind::add: {
            bool parens = kAdd < parent_prec;
            if (parens) out += "\\left(";
            bool first = true;
            for (const Expr& t : e.children()) {
                std::string piece;
                Expr shown = t;
                bool neg = false;
                if (t.kind() == Kind::constant && t.number_value().negative()) {
                    neg = true;
                    shown = Expr::number(t.number_value().neg());
                } else if (t.kind() == Kind::mul && t.children()[0].kind() == Kind::constant &&
                           t.children()[0].number_value().negative()) {
                    neg = true;
                    shown = Expr::mul({Expr::integer(-1), t});
                }
                latex_rec(shown, piece, kAdd + 1);
                if (first) out += neg ? "-" : "";
                else out += neg ? " - " : " + ";
                out += piece;
                first = false;
            }
            if (parens) out += "\\right)";
            return;
        }
        case Kind::mul: {
            bool parens = kMul < parent_prec;
            if (parens) out += "\\left(";
            const auto& kids = e.children();
            size_t start = 0;
            if (kids[0].kind() == Kind::constant && kids[0].number_value().is_minus_one() &&
                kids.size() > 1) {
                out += '-';
                start = 1;
            }
            bool first = true;
            for (size_t idx = start; idx < kids.size(); ++idx) {
                if (!first) out += "\\,";
                latex_rec(kids[idx], out, kMul + 1);
                first = false;
            }
            if (parens) out += "\\right)";
            return;
        }
    }
}

} // namespace

std::string to_latex(const Expr& e) {
    std::string out;
    latex_rec(e, out, kAdd);
    return out;
}

} // namespace qintcart
