#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chemtok {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid encoder/reduction configuration or image geometry.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite activations inside an encoder layer.
class NumericError : public Error {
 public:
  NumericError(int layer, const std::string& what)
      : Error("layer " + std::to_string(layer) + ": " + what), layer_(layer) {}
  int layer() const { return layer_; }

 private:
  int layer_;
};

/// A reduction step asked for more removals than the token set allows.
class ScheduleError : public Error {
 public:
  using Error::Error;
};

/// Operation applied to a token set with the wrong structure.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// SMILES syntax or chemistry error. `offset` is a byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset), message_(what) {}
  std::size_t offset() const { return offset_; }
  /// The message without the offset suffix.
  const std::string& message() const { return message_; }

 private:
  std::size_t offset_;
  std::string message_;
};

/// Malformed reaction string or record file.
class FormatError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

/// Ground truth that does not parse; aborts an evaluation run.
class DatasetError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class UnsupportedInput : public Error {
 public:
  using Error::Error;
};

}  // namespace chemtok
