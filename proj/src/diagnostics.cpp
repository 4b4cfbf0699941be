#include "refi/diagnostics.hpp"

namespace refi {

std::string to_string(const Span& span) {
  return std::to_string(span.line) + ":" + std::to_string(span.column);
}

CompileError::CompileError(Span span, const std::string& message)
    : std::runtime_error(to_string(span) + ": " + message), span_(span), message_(message) {}

std::string format(const Diagnostic& d, const std::string& file) {
  std::string out;
  if (!file.empty()) out += file + ":";
  out += to_string(d.span) + ": ";
  out += d.severity == Diagnostic::Severity::Error ? "error: " : "warning: ";
  out += d.message;
  return out;
}

}  // namespace refi
