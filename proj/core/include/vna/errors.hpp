#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vna {

// Byte range into an input buffer, attached to parse diagnostics.
struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
};

class ParseError : public std::runtime_error {
public:
  ParseError(std::string msg, SourceSpan span)
      : std::runtime_error(std::move(msg)), span_(span) {}
  const SourceSpan& span() const { return span_; }

private:
  SourceSpan span_;
};

// A caller violated a documented precondition (bad shapes, bad ranges,
// unsupported sentence class, ...).
class PreconditionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A configured resource cap was hit (dimension cap, node budget, ...).
class ResourceLimitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace vna
