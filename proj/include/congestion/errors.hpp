#pragma once

#include <stdexcept>
#include <string>

namespace congestion {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Congestion ratio reached or crossed the barrier of a singular law.
class BarrierViolation : public Error {
public:
  using Error::Error;
};

class ParameterError : public Error {
public:
  using Error::Error;
};

class QuadratureFailure : public Error {
public:
  using Error::Error;
};

/// Invalid barrier or grid specification.
class SpecError : public Error {
public:
  using Error::Error;
};

class UnknownScenario : public Error {
public:
  using Error::Error;
};

class NonFinite : public Error {
public:
  using Error::Error;
};

/// Time step collapsed below the floor relative to t_end.
class DegenerateState : public Error {
public:
  using Error::Error;
};

/// Step rejected after the maximum number of dt halvings.
class StepFailure : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace congestion
