#pragma once

#include <stdexcept>
#include <string>

namespace ifsm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Wrong filter count, N < 2, or a filter that cannot be represented.
class MalformedBank : public Error {
public:
  using Error::Error;
};

class ChannelOutOfRange : public Error {
public:
  using Error::Error;
};

/// The coefficient window is not mapped into itself by every adjoint.
class WindowTooSmall : public Error {
public:
  using Error::Error;
};

/// The requested enumeration exceeds the configured node cap.
class DepthOverflow : public Error {
public:
  using Error::Error;
};

class NotUnitVector : public Error {
public:
  using Error::Error;
};

/// Two measures compared atom by atom live on different partitions.
class DepthMismatch : public Error {
public:
  using Error::Error;
};

/// Input text (JSON, CSV, grid spec) that does not match its schema.
class ParseError : public Error {
public:
  using Error::Error;
};

} // namespace ifsm
