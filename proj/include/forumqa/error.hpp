#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace forumqa {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that cannot be decoded at all (bad encoding, truncated stream).
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t byte_offset)
      : Error(what + " at byte " + std::to_string(byte_offset)), byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class EmptyCorpusError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class StaleArtifactError : public Error {
 public:
  StaleArtifactError(std::string stage, const std::string& why)
      : Error("stale artifact from stage '" + stage + "': " + why), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// A second writer while a mutation is in progress.
class ConflictError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Transient failure; the caller may retry the same request.
class RetriableError : public Error {
 public:
  using Error::Error;
};

}  // namespace forumqa
