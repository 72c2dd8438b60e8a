#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hlcf/tower.hpp"

namespace hlcf {

/// Parses an arithmetic expression in the tower's variables, the generator
/// name of F_q, integer literals, + - * / ^ (integer exponents) and
/// parentheses. The result lives at `level` (default: the full tower).
/// Throws ParseError (with position), DomainError (division by zero) or
/// PrecisionError.
Elem parse_elem(const Tower& tw, std::string_view expr, int level = -1);

/// Splits "{a, b, c}" into its entry strings (top-level commas only).
std::vector<std::string> split_symbol(std::string_view text);

}  // namespace hlcf
