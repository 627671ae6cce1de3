#pragma once

#include <stdexcept>
#include <string>

namespace adaptkry {

// Error categories map 1:1 onto the CLI exit codes (2/3/4/5).

struct io_error : std::runtime_error {
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

struct validation_error : std::runtime_error {
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

struct theorem_violation : std::runtime_error {
  explicit theorem_violation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace adaptkry
