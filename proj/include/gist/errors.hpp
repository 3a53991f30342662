#pragma once

#include <stdexcept>
#include <string>

namespace gist {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IngestError : Error {
  using Error::Error;
};

struct UnknownDatasetError : Error {
  using Error::Error;
};

struct UnmappedSignalError : Error {
  using Error::Error;
};

struct InvalidSignalError : Error {
  using Error::Error;
};

struct EmptyChunkError : Error {
  using Error::Error;
};

struct PoolTooSmallError : Error {
  using Error::Error;
};

struct InsufficientSamplesError : Error {
  using Error::Error;
};

struct InsufficientPoolError : Error {
  using Error::Error;
};

struct JudgeProtocolError : Error {
  using Error::Error;
};

struct TransportError : Error {
  using Error::Error;
};

struct MissingAssignmentError : Error {
  using Error::Error;
};

struct StageDependencyError : Error {
  using Error::Error;
};

struct DegenerateInputError : Error {
  using Error::Error;
};

}  // namespace gist
