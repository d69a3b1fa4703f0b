#include "netdyn/errors.hpp"

namespace netdyn {

namespace {

std::string describe_syntax(std::size_t offset, const std::vector<std::string>& expected,
                            const std::string& found) {
  std::string msg = "syntax error at offset " + std::to_string(offset) + ": found " + found +
                    ", expected one of {";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) msg += ", ";
    msg += expected[i];
  }
  return msg + "}";
}

std::string describe_format(const std::string& what, std::size_t line, std::size_t column) {
  if (line == 0) return what;
  return what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")";
}

}  // namespace

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected,
                         const std::string& found)
    : Error(describe_syntax(offset, expected, found)),
      offset_(offset),
      expected_(std::move(expected)) {}

IntegrationError::IntegrationError(std::size_t step, const std::string& what)
    : Error("integration aborted at step " + std::to_string(step) + ": " + what), step_(step) {}

FormatError::FormatError(const std::string& what, std::size_t line, std::size_t column)
    : Error(describe_format(what, line, column)), line_(line), column_(column) {}

}  // namespace netdyn
