#pragma once

#include <string_view>

#include "qintcart/expr.hpp"

namespace qintcart {

struct parse_error : expr_error {
    parse_error(const std::string& msg, size_t offset)
        : expr_error(msg + " (at byte " + std::to_string(offset) + ")"), offset(offset) {}
    size_t offset;
};

// Parses the expression grammar: identifiers, numeric literals, + - * / ^,
// parentheses, abstract application f(x), derivative suffixes f''(x), f^(n)(x)
// and partial suffixes V_xy(x,y,z), builtins sin/cos/sinh/cosh/exp, and the
// symbols `i` and `hbar`. parse(to_string(e)) == e for canonical e.
Expr parse(std::string_view text);

} // namespace qintcart
