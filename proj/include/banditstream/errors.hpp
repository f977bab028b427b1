#pragma once

#include <stdexcept>
#include <string>

namespace banditstream {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};
class InvalidParameter : public Error {
 public:
  using Error::Error;
};
class DomainError : public Error {
 public:
  using Error::Error;
};
class NotEnoughArms : public Error {
 public:
  using Error::Error;
};
class OutOfOrderRound : public Error {
 public:
  using Error::Error;
};
class RewardOutOfRange : public Error {
 public:
  using Error::Error;
};
class NeverObserved : public Error {
 public:
  using Error::Error;
};
class NonPsdCovariance : public Error {
 public:
  using Error::Error;
};
class LengthMismatch : public Error {
 public:
  using Error::Error;
};
class MalformedTrace : public Error {
 public:
  using Error::Error;
};
class MissingRound : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace banditstream
