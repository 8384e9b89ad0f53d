#pragma once

#include <stdexcept>
#include <string>

namespace hfa {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes of matrices, potentials or boxes do not agree.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The chemical potential coincides with an eigenvalue: the gap is closed.
class EigenvalueAtMu : public Error {
 public:
  EigenvalueAtMu(double mu, double eigenvalue)
      : Error("eigenvalue " + std::to_string(eigenvalue) + " lies at mu = " + std::to_string(mu)),
        mu_(mu),
        eigenvalue_(eigenvalue) {}

  double mu() const { return mu_; }
  double eigenvalue() const { return eigenvalue_; }

 private:
  double mu_;
  double eigenvalue_;
};

class NoGap : public Error {
 public:
  using Error::Error;
};

class ResolventSingular : public Error {
 public:
  using Error::Error;
};

/// Gap too small for the contraction estimate of the fixed-point map.
class GapTooSmall : public Error {
 public:
  using Error::Error;
};

class ResonantBox : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& message)
      : Error(message), key_(std::move(key)) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace hfa
