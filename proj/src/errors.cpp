#include "liouville/errors.hpp"

#include <sstream>

namespace liouville {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += ", ";
    out += item;
  }
  return out;
}

}  // namespace

ParseError::ParseError(std::string message, std::size_t offset, std::vector<std::string> expected)
    : Error("syntax error at offset " + std::to_string(offset) + ": " + message +
            (expected.empty() ? std::string{} : " (expected one of: " + join(expected) + ")")),
      offset_(offset),
      expected_(std::move(expected)) {}

UnknownIdentifier::UnknownIdentifier(std::string name, std::size_t offset,
                                     std::vector<std::string> known)
    : Error("unknown identifier '" + name + "' at offset " + std::to_string(offset) +
            " (known symbols: " + join(known) + ")"),
      name_(std::move(name)),
      offset_(offset),
      known_(std::move(known)) {}

DomainError::DomainError(std::string node, double input)
    : Error([&] {
        std::ostringstream msg;
        msg << "domain error evaluating '" << node << "' at x = " << input;
        return msg.str();
      }()),
      node_(std::move(node)),
      input_(input) {}

UnboundParameter::UnboundParameter(std::string name)
    : Error("unbound parameter '" + name + "'"), name_(std::move(name)) {}

WronskianViolation::WronskianViolation(std::string message, double drift)
    : Error(std::move(message)), drift_(drift) {}

SingularSolution::SingularSolution(double t, double x)
    : Error([&] {
        std::ostringstream msg;
        msg << "F vanishes at (t, x) = (" << t << ", " << x << "); the solution is singular there";
        return msg.str();
      }()),
      t_(t),
      x_(x) {}

}  // namespace liouville
