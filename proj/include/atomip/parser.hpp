#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "atomip/problem.hpp"

namespace atomip {

/// 1-based position of a diagnostic inside the input text.
struct SourceSpan {
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t length = 0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, SourceSpan span);

  const SourceSpan& span() const { return span_; }
  const std::string& detail() const { return detail_; }

 private:
  SourceSpan span_;
  std::string detail_;
};

/// Parses the `.ip` text format:
///
///     # comment
///     var x1 in 0..2
///     maximize 3*x1 + 2*x2 + x3
///     subject c1: 2*x1 + x2 <= 3
///
/// Variables must be declared before use; exactly one `maximize` line is
/// required. Constant terms on a constraint's left-hand side are moved to the
/// right-hand side.
Problem parse_problem(std::string_view text);

/// Canonical rendering; `parse_problem(format_problem(p)) == p`.
std::string format_problem(const Problem& p);

std::string format_polynomial(const Polynomial& poly, const std::vector<Variable>& vars);

}  // namespace atomip
