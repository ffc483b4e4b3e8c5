#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace symcanon {

/// Broad failure class; the CLI maps it onto its exit code.
enum class ErrorClass {
  input,      ///< malformed input, bad configuration, unsupported request
  numerical,  ///< degenerate geometry, divergence, non-convergence
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what)
      : std::runtime_error(what), cls_(cls) {}
  ErrorClass error_class() const noexcept { return cls_; }

 private:
  ErrorClass cls_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorClass::input, what) {}
};

class UnsupportedKind : public Error {
 public:
  explicit UnsupportedKind(const std::string& what)
      : Error(ErrorClass::input, what) {}
};

class GroupNotFinite : public Error {
 public:
  explicit GroupNotFinite(const std::string& what)
      : Error(ErrorClass::input, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : Error(ErrorClass::input,
              what + " (at byte " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class DegenerateConfiguration : public Error {
 public:
  explicit DegenerateConfiguration(const std::string& what)
      : Error(ErrorClass::numerical, what) {}
};

class TrainingDiverged : public Error {
 public:
  TrainingDiverged(const std::string& what, int epoch)
      : Error(ErrorClass::numerical,
              what + " (epoch " + std::to_string(epoch) + ")"),
        epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace symcanon
