#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ranharness {

/// One validation finding. path uses dotted keys with [i] indexes, e.g.
/// "components[2].params.gain_db". line/column are 1-based, 0 when unknown.
struct Diagnostic {
  std::string path;
  std::string message;
  int line = 0;
  int column = 0;

  bool operator==(const Diagnostic&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const Diagnostic& d) {
  if (d.line > 0) os << d.line << ':' << d.column << ": ";
  if (!d.path.empty()) os << d.path << ": ";
  return os << d.message;
}

/// Value-or-diagnostics return type for operations that report every problem
/// instead of failing fast.
template <class T>
struct Checked {
  std::optional<T> value;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return value.has_value(); }
  explicit operator bool() const { return ok(); }
  const T& operator*() const { return *value; }
  T& operator*() { return *value; }
  const T* operator->() const { return &*value; }
  T* operator->() { return &*value; }
};

}  // namespace ranharness
