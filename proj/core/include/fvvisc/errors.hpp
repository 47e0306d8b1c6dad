#pragma once

#include <stdexcept>
#include <string>

#include "fvvisc/types.hpp"

namespace fvvisc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A cell with zero or negative volume, reported with its index.
class DegenerateMesh : public Error {
 public:
  DegenerateMesh(Index cell, const std::string& what) : Error(what), cell_(cell) {}
  Index cell() const noexcept { return cell_; }

 private:
  Index cell_;
};

class SingularStencil : public Error {
 public:
  SingularStencil(Index cell, const std::string& what) : Error(what), cell_(cell) {}
  Index cell() const noexcept { return cell_; }

 private:
  Index cell_;
};

/// Zero face-normal distance or zero inverse-distance weight.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

class NonpositiveTemperature : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

/// Raised when an observed order cannot be formed (zero error on a grid).
class DegenerateOrder : public Error {
 public:
  using Error::Error;
};

}  // namespace fvvisc
