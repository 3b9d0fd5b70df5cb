#pragma once

#include <stdexcept>
#include <string>

namespace scorepred {

enum class ErrorKind {
  InvalidArgument,
  InvalidConfig,
  MalformedRow,
  MissingColumn,
  EmptyInput,
  EmptyDataset,
  IndexOutOfRange,
  NonFiniteLoss,
  EmptyPool,
  UnknownId,
  DegenerateDesign,
  AllMasked,
  VocabOverflow,
  LengthOverflow,
  HeadMismatch,
  LengthMismatch,
  MissingHistory,
  UntrainedModel,
  SingleArm,
  InsufficientN,
  Io,
  Parse,
  State,
};

const char* error_kind_name(ErrorKind kind);

// Single exception type for the whole library. `line` is the 1-based file
// line for row-level ingestion errors, -1 otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, long line = -1)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind),
        line_(line) {}

  ErrorKind kind() const noexcept { return kind_; }
  long line() const noexcept { return line_; }

 private:
  ErrorKind kind_;
  long line_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string message, long line = -1) {
  throw Error(kind, std::move(message), line);
}

inline const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::EmptyPool: return "EmptyPool";
    case ErrorKind::UnknownId: return "UnknownId";
    case ErrorKind::DegenerateDesign: return "DegenerateDesign";
    case ErrorKind::AllMasked: return "AllMasked";
    case ErrorKind::VocabOverflow: return "VocabOverflow";
    case ErrorKind::LengthOverflow: return "LengthOverflow";
    case ErrorKind::HeadMismatch: return "HeadMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::MissingHistory: return "MissingHistory";
    case ErrorKind::UntrainedModel: return "UntrainedModel";
    case ErrorKind::SingleArm: return "SingleArm";
    case ErrorKind::InsufficientN: return "InsufficientN";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::State: return "State";
  }
  return "Unknown";
}

}  // namespace scorepred
