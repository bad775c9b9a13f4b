#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace relcompose {

enum class Severity { warning, error };

/// One problem found while parsing, linking or validating. `file` and `path`
/// locate it: path is an element path such as `service[2]/message[1]/part[3]`.
struct Diagnostic {
  Severity severity = Severity::error;
  std::string file;
  std::string path;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

std::string to_string(const Diagnostic& d);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// Value-or-diagnostics result used by every parser. Warnings may accompany a
/// value; any error-severity diagnostic means `value` is empty.
template <class T>
struct Parsed {
  std::optional<T> value;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return value.has_value(); }
};

/// Thrown on contract violations of the in-memory model (unknown names,
/// duplicate declarations, dead ids).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an ontology draft cannot be built; carries every diagnostic.
class OntologyError : public Error {
 public:
  explicit OntologyError(std::vector<Diagnostic> diagnostics);

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// `[A-Za-z_][A-Za-z0-9_]*`
bool is_identifier(std::string_view s);

}  // namespace relcompose
