#pragma once

#include <stdexcept>
#include <string>

namespace yolo_assist {

// Root of every exception the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text or bytes (cfg, weights, labels, images, manifests).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Incompatible tensor or layer dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// NaN or Inf reached a place where only finite values are allowed.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Caller supplied an invalid argument (bad size, bad threshold, missing flag).
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace yolo_assist
