#pragma once

#include <stdexcept>
#include <string>

namespace alignguard {

// Exit codes used by the CLI: 0 success, 1 usage/config error,
// 2 stage failure, 3 infrastructure failure.
enum class ExitCode : int {
  Ok = 0,
  Usage = 1,
  StageFailure = 2,
  InfraFailure = 3,
};

class Error : public std::runtime_error {
 public:
  explicit Error(std::string msg) : std::runtime_error(std::move(msg)) {}
};

// Bad user input: unreadable paths, malformed configs, invalid flags.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A record, document, or test file violates its schema.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A (bug_type, root_cause) or (bug_type, trigger_family) pair the
// compatibility map forbids, or an unknown label.
class TaxonomyError : public Error {
 public:
  using Error::Error;
};

// A pipeline stage could not produce its output (retries exhausted,
// invariant violated on the produced value). Campaigns log and continue
// where the spec allows; the CLI maps hard failures to exit code 2.
class StageError : public Error {
 public:
  StageError(std::string stage, std::string msg)
      : Error(stage + ": " + msg), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Worker spawn failures, malformed worker result documents, missing
// python runtime. Maps to exit code 3.
class InfraError : public Error {
 public:
  using Error::Error;
};

// LLM gateway errors: endpoint failures, replay misses, missing credentials.
class GatewayError : public Error {
 public:
  using Error::Error;
};

class ReplayMissError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

// Caller violated an operation precondition (programming error).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace alignguard
