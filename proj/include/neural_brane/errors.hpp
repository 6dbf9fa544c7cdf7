#ifndef NEURAL_BRANE_ERRORS_HPP
#define NEURAL_BRANE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace neural_brane {

/// Bad user input: malformed files, out-of-range ids, violated preconditions.
/// The CLI maps these to exit code 1.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A line in an input file could not be parsed or validated.
class ParseError : public InputError {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : InputError(path + ":" + std::to_string(line) + ": " + what),
          path_(path), line_(line) {}

    const std::string& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

/// NaN/Inf showed up where the math says it cannot. Exit code 2.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace neural_brane

#endif // NEURAL_BRANE_ERRORS_HPP
