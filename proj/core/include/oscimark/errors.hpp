#pragma once

#include <stdexcept>
#include <string>

namespace oscimark {

// Error categories map onto CLI exit codes: schema errors exit 2,
// computation/data errors exit 3, empty-selection halts exit 4.
enum class ErrorKind {
  Schema,
  Parameter,
  Configuration,
  Data,
  InsufficientData,
  Computation,
  EmptySelection,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::Data: return "data";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::Computation: return "computation";
    case ErrorKind::EmptySelection: return "empty-selection";
  }
  return "unknown";
}

}  // namespace oscimark
