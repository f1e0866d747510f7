#pragma once

#include <stdexcept>
#include <string>

namespace slipflow {

enum class ErrorKind {
  geometry,
  configuration,
  meshing,
  import,
  data,
  compatibility,
  solver,
  non_convergence,
  branch_degeneracy,
  numerical_rank,
  multivalued_stream,
  io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind), message_(message) {}

  ErrorKind kind() const { return kind_; }
  const std::string& message() const { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

}  // namespace slipflow
