#pragma once

#include <stdexcept>
#include <string>

namespace mriboost {

// Exit codes used by the CLI: 2 config, 3 data, 4 divergence.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
  virtual int exit_code() const { return 1; }
};

class ConfigError : public Error {
public:
  using Error::Error;
  int exit_code() const override { return 2; }
};

enum class DataFault {
  missing_file,
  bad_magic,
  truncated,
  non_finite,
  shape_mismatch,
  io,
};

class DataError : public Error {
public:
  DataError(DataFault fault, const std::string& msg) : Error(msg), fault_(fault) {}
  int exit_code() const override { return 3; }
  DataFault fault() const { return fault_; }

private:
  DataFault fault_;
};

class DivergenceError : public Error {
public:
  using Error::Error;
  int exit_code() const override { return 4; }
};

}  // namespace mriboost
