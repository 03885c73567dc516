#pragma once

#include <stdexcept>
#include <string>

namespace echolevel {

// Base for every error the library throws. kind() is a short stable tag used
// by the CLI for its one-line machine-parsable error output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Invalid configuration values (sweep, scene, training, search space).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

// Inputs with the wrong shape: lengths, bounds, non-power-of-two frames.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error("input", what) {}
};

class TrainingError : public Error {
 public:
  explicit TrainingError(const std::string& what) : Error("training", what) {}
};

// Malformed or incompatible files (models, datasets, messages).
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error("format", what) {}
};

class EvaluationError : public Error {
 public:
  explicit EvaluationError(const std::string& what) : Error("evaluation", what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace echolevel
