#pragma once

#include <stdexcept>
#include <string>

namespace maxlab {

// Base of every error raised by the library. The CLI maps all of these to
// exit status 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BoundsError : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

class ExponentError : public Error {
public:
    using Error::Error;
};

class ThresholdError : public Error {
public:
    using Error::Error;
};

class OrientationError : public Error {
public:
    using Error::Error;
};

class SectorError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace maxlab
