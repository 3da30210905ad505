#pragma once
#include <string_view>

#include "piii/exactalg/ratfun.hpp"

namespace piii::exactalg {

// Grammar: integers, decimals (read as exact fractions), rationals p/q,
// imaginary unit i, identifiers, + - * / ^ (integer exponents), parentheses.
// A literal p/q directly followed by i reads as (p/q)*i.
RatFun parse(std::string_view text);
GaussRat parse_number(std::string_view text);  // must evaluate to a constant

}  // namespace piii::exactalg
