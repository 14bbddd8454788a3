#ifndef AVRPLAN_ERRORS_HPP_
#define AVRPLAN_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace avrplan {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed mesh input. line() is 1-based; 0 when the failure is not tied to a line.
class FormatError : public Error {
public:
    FormatError(const std::string& message, std::size_t line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class EmptySceneError : public Error {
public:
    using Error::Error;
};

// Parameter or configuration outside its valid range.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A face cluster whose projected points have no 2D extent.
class DegenerateClusterError : public Error {
public:
    using Error::Error;
};

} // namespace avrplan

#endif
