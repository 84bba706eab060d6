#pragma once

#include <string_view>

namespace dppgeo::cli {

/// Evaluates an arithmetic expression with + - * / ^, parentheses, unary
/// signs, the functions log, exp and sqrt, and the constants pi and e.
/// Throws std::invalid_argument on malformed input or a non-finite result.
double evaluate_expression(std::string_view text);

}  // namespace dppgeo::cli
