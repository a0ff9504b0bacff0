#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace epihumat {

// Input could not be read (missing file, unreadable path).
class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input was read but is not well-formed (bad JSON, malformed row).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input is well-formed but violates an invariant. Carries every violation
// found, each naming the offending field.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

  explicit ValidationError(std::string issue)
      : ValidationError(std::vector<std::string>{std::move(issue)}) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out;
    for (const auto& issue : issues) {
      if (!out.empty()) out += "; ";
      out += issue;
    }
    return out;
  }

  std::vector<std::string> issues_;
};

}  // namespace epihumat
