#pragma once

#include <stdexcept>
#include <string>

namespace mirt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: bad grid, malformed config, violated precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Field is not zero in the boundary margin, so periodic spectral operators would wrap.
class MarginError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

/// Direction too close to the z axis for the spherical frame.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// The plane H(x, xi) contains an arc of the curve.
class DegeneratePlane : public Error {
 public:
  using Error::Error;
};

/// An intersection point is too close to the set where gamma'(t) . xi = 0.
class SigmaProximity : public Error {
 public:
  using Error::Error;
};

class NotElliptic : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace mirt
