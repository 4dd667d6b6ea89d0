#pragma once

#include <stdexcept>
#include <string>

namespace xferlab {

enum class ErrorKind {
  InvalidArgument,  // rejected input: bad shapes, out-of-range values
  Format,           // malformed file: bad magic, truncation, mismatch
  Config,           // config file errors (carry line numbers)
  Training,         // divergence or under-trained model
  Attack,           // non-finite gradients etc. during an attack
  Degenerate,       // zero guide vector / empty regression problem
  Prerequisite,     // required artifact missing on disk
  Io,               // filesystem errors
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Format: return "format";
    case ErrorKind::Config: return "config";
    case ErrorKind::Training: return "training";
    case ErrorKind::Attack: return "attack";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Prerequisite: return "prerequisite";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace xferlab
