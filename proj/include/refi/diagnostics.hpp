#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace refi {

/// 1-based source position. A zero line means "no location".
struct Span {
  int line = 0;
  int column = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

std::string to_string(const Span& span);

/// User-facing error raised by the front end and the analyses. Always
/// carries a span; the message is prefixed with `line:col:` by what().
class CompileError : public std::runtime_error {
 public:
  CompileError(Span span, const std::string& message);

  const Span& span() const { return span_; }
  const std::string& message() const { return message_; }

 private:
  Span span_;
  std::string message_;
};

/// Broken invariant inside the toolchain itself (exit code 2 in the CLI).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Diagnostic {
  enum class Severity { Warning, Error };

  Severity severity = Severity::Error;
  Span span;
  std::string message;
};

std::string format(const Diagnostic& d, const std::string& file = {});

}  // namespace refi
