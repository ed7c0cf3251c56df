#pragma once

#include <stdexcept>
#include <string>

namespace cadsynth {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based, 0 when unknown.
class FormatError : public Error {
public:
    FormatError(const std::string &what, int line = 0)
        : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Invalid randomizer / generator specification.
class SpecError : public Error {
public:
    using Error::Error;
};

class DegenerateViewError : public Error {
public:
    using Error::Error;
};

class BehindCameraError : public Error {
public:
    using Error::Error;
};

class RenderError : public Error {
public:
    using Error::Error;
};

}  // namespace cadsynth
