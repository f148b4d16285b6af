#pragma once

#include <stdexcept>
#include <string>

namespace zsl {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input / format errors.
class FormatError : public Error { using Error::Error; };
class ParseError : public Error { using Error::Error; };
class EmptyInputError : public Error { using Error::Error; };
class InvalidParameter : public Error { using Error::Error; };
class InvalidInput : public Error { using Error::Error; };
class ShapeError : public Error { using Error::Error; };
class MissingVectorError : public Error { using Error::Error; };
class SizeLimitError : public Error { using Error::Error; };

// Numerical failures.
class SingularSystemError : public Error { using Error::Error; };
class NumericalError : public Error { using Error::Error; };

}  // namespace zsl
