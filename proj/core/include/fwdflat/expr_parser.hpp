#pragma once

#include <string_view>

#include "fwdflat/scalar.hpp"

namespace fwdflat {

/// Parses rational expression text: integers, variables `[a-zA-Z][a-zA-Z0-9]*`,
/// `+ - * /`, `^` with an integer exponent, and parentheses.
///
/// Throws ParseError with the 1-based column of the offending character, or
/// NonRationalExpression for function applications such as `sin(x1)`.
/// `column_offset` shifts reported columns when `text` is a slice of a line.
Scalar parse_scalar(std::string_view text, std::size_t column_offset = 0);

}  // namespace fwdflat
