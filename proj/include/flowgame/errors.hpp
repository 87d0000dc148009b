#pragma once

#include <stdexcept>
#include <string>

namespace flowgame {

// Malformed specs, scenario files, and dimension mismatches.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// The projected dynamics failed to produce a certified solution.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace flowgame
