#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sts {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: dimension mismatches, non-dual grids, bad parameters.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A computation that could not meet its numerical contract.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, double energy, double x_lo, double x_hi)
      : NumericalError(what), energy_(energy), x_lo_(x_lo), x_hi_(x_hi) {}

  double energy() const { return energy_; }
  double x_lo() const { return x_lo_; }
  double x_hi() const { return x_hi_; }

 private:
  double energy_;
  double x_lo_;
  double x_hi_;
};

// An evanescent growth factor exceeded the cap in strict mode.
class OverflowError : public NumericalError {
 public:
  OverflowError(const std::string& what, std::size_t energy_index, std::size_t x_index,
                double energy, double x)
      : NumericalError(what),
        energy_index_(energy_index),
        x_index_(x_index),
        energy_(energy),
        x_(x) {}

  std::size_t energy_index() const { return energy_index_; }
  std::size_t x_index() const { return x_index_; }
  double energy() const { return energy_; }
  double x() const { return x_; }

 private:
  std::size_t energy_index_;
  std::size_t x_index_;
  double energy_;
  double x_;
};

}  // namespace sts
