#ifndef SCENRISK_ERRORS_HPP
#define SCENRISK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace scenrisk {

// Bad inputs: malformed files, out-of-domain parameters, inconsistent
// configuration. Maps to process exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// An algorithm failed to converge or left its numerical domain. Maps to
// process exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace scenrisk

#endif  // SCENRISK_ERRORS_HPP
